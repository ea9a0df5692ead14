//! Named presets, each expanding to a fully explicit [`RunConfig`].

use dicke_cat::ModelParams;

use crate::config::{ArchitectureName, ModelSection, NoiseSection, RunConfig, RunKind};
use crate::error::CliError;

pub const PRESETS: [&str; 6] = ["fig1", "fig2", "fig5_7", "fig4_8", "free_energy_sketch", "instanton_demo"];

pub fn preset(name: &str) -> Result<RunConfig, CliError> {
    let mut cfg = match name {
        // ground-state spectrum and photon statistics of the open N=7 chain
        "fig1" => {
            let mut c = RunConfig::new(RunKind::GroundState);
            c.model = ModelSection::from(&ModelParams::fig2());
            c
        }
        "fig2" => {
            let mut c = RunConfig::new(RunKind::Wigner);
            c.model = ModelSection::from(&ModelParams::fig2());
            c
        }
        "fig5_7" => {
            let mut c = RunConfig::new(RunKind::Quench);
            c.model = ModelSection::from(&ModelParams::fig4());
            c.dynamics.t_final = 5.0;
            c.dynamics.samples = 201;
            c
        }
        "fig4_8" => {
            let mut c = RunConfig::new(RunKind::NoisyTrotter);
            c.model = ModelSection::from(&ModelParams::fig4());
            c.noise = Some(NoiseSection::default());
            c.dynamics.t_final = 5.0;
            c.dynamics.steps = 15;
            c.dynamics.architecture = ArchitectureName::ChainSwap;
            c
        }
        "free_energy_sketch" => {
            let mut c = RunConfig::new(RunKind::FreeEnergy);
            c.model = ModelSection::from(&ModelParams::fig4());
            c.field.models = vec!["dicke".into(), "dicke_ising".into()];
            c.field.couplings = vec![0.8, 1.0, 1.2];
            c.field.relative_to_critical = true;
            c
        }
        "instanton_demo" => {
            let mut c = RunConfig::new(RunKind::Instanton);
            c.model = ModelSection::from(&ModelParams::fig4());
            c.field.models = vec!["dicke_ising".into()];
            c.field.couplings = vec![1.1];
            c.field.relative_to_critical = true;
            c
        }
        other => {
            return Err(CliError::Config(format!(
                "unknown preset `{other}` (available: {})",
                PRESETS.join(", ")
            )))
        }
    };
    cfg.preset = Some(name.to_string());
    Ok(cfg)
}
