//! Plain-text (TOML) run configuration.
//!
//! Couplings are dimensionless in units of `ω0`, noise rates are ordinary
//! frequencies in Hz and the Rabi-gate duration is in seconds.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use dicke_cat::circuit::Architecture;
use dicke_cat::field::FreeEnergyModel;
use dicke_cat::noise::NoiseParams;
use dicke_cat::{Boundary, ModelParams};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunKind {
    GroundState,
    Quench,
    Trotter,
    NoisyTrotter,
    Wigner,
    FreeEnergy,
    Instanton,
    Angular,
}

impl RunKind {
    pub const ALL: [RunKind; 8] = [
        RunKind::GroundState,
        RunKind::Quench,
        RunKind::Trotter,
        RunKind::NoisyTrotter,
        RunKind::Wigner,
        RunKind::FreeEnergy,
        RunKind::Instanton,
        RunKind::Angular,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RunKind::GroundState => "ground_state",
            RunKind::Quench => "quench",
            RunKind::Trotter => "trotter",
            RunKind::NoisyTrotter => "noisy_trotter",
            RunKind::Wigner => "wigner",
            RunKind::FreeEnergy => "free_energy",
            RunKind::Instanton => "instanton",
            RunKind::Angular => "angular",
        }
    }
}

impl fmt::Display for RunKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RunKind {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let key = s.replace('-', "_");
        RunKind::ALL
            .into_iter()
            .find(|k| k.name() == key)
            .ok_or_else(|| CliError::Config(format!("unknown run kind `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Units {
    pub energy: String,
    pub noise_rates: String,
    pub tau_rabi: String,
}

impl Default for Units {
    fn default() -> Self {
        Self {
            energy: "omega0".into(),
            noise_rates: "Hz".into(),
            tau_rabi: "s".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryName {
    Open,
    Periodic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    pub omega0: f64,
    pub omegaz: f64,
    pub j: f64,
    pub g: f64,
    pub n_qubits: usize,
    pub n_max: usize,
    pub spin: f64,
    pub boundary: BoundaryName,
}

impl Default for ModelSection {
    fn default() -> Self {
        Self::from(&ModelParams::fig4())
    }
}

impl From<&ModelParams> for ModelSection {
    fn from(p: &ModelParams) -> Self {
        Self {
            omega0: p.omega0,
            omegaz: p.omegaz,
            j: p.j,
            g: p.g,
            n_qubits: p.n_qubits,
            n_max: p.n_max,
            spin: p.spin,
            boundary: match p.boundary {
                Boundary::Open => BoundaryName::Open,
                Boundary::Periodic => BoundaryName::Periodic,
            },
        }
    }
}

impl ModelSection {
    pub fn params(&self) -> ModelParams {
        ModelParams {
            omega0: self.omega0,
            omegaz: self.omegaz,
            j: self.j,
            g: self.g,
            n_qubits: self.n_qubits,
            n_max: self.n_max,
            spin: self.spin,
            boundary: match self.boundary {
                BoundaryName::Open => Boundary::Open,
                BoundaryName::Periodic => Boundary::Periodic,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseSection {
    pub kappa_hz: f64,
    pub gamma_phi_hz: f64,
    pub gamma_1_hz: f64,
    pub tau_rabi_s: f64,
}

impl Default for NoiseSection {
    fn default() -> Self {
        Self {
            kappa_hz: 1e3,
            gamma_phi_hz: 5e3,
            gamma_1_hz: 5e3,
            tau_rabi_s: 100e-9,
        }
    }
}

impl NoiseSection {
    pub fn params(&self) -> Result<NoiseParams, CliError> {
        Ok(NoiseParams::from_hz(self.kappa_hz, self.gamma_phi_hz, self.gamma_1_hz, self.tau_rabi_s)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArchitectureName {
    ChainSwap,
    Star,
}

impl From<ArchitectureName> for Architecture {
    fn from(a: ArchitectureName) -> Self {
        match a {
            ArchitectureName::ChainSwap => Architecture::ChainSwap,
            ArchitectureName::Star => Architecture::Star,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameName {
    Lab,
    Interaction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DynamicsSection {
    pub t_final: f64,
    /// Time samples of the exact quench trace, endpoints included.
    pub samples: usize,
    /// Trotter steps `L`.
    pub steps: usize,
    pub architecture: ArchitectureName,
    /// Frame of the circuit output used for tomography.
    pub frame: FrameName,
}

impl Default for DynamicsSection {
    fn default() -> Self {
        Self {
            t_final: 5.0,
            samples: 201,
            steps: 15,
            architecture: ArchitectureName::ChainSwap,
            frame: FrameName::Lab,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    /// Half-width of the square phase-space grid.
    pub extent: f64,
    pub points: usize,
}

impl Default for GridSection {
    fn default() -> Self {
        Self { extent: 6.0, points: 121 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FieldSection {
    pub models: Vec<String>,
    /// Couplings to scan; the model `g` is used when empty.
    pub couplings: Vec<f64>,
    /// Read `couplings` as multiples of each model's critical coupling.
    pub relative_to_critical: bool,
    pub u_points: usize,
    /// Half-width of the `u` grid for the angular surface.
    pub u_extent: f64,
    pub phi_points: usize,
    pub tau_points: usize,
}

impl Default for FieldSection {
    fn default() -> Self {
        Self {
            models: vec!["dicke".into(), "dicke_ising".into()],
            couplings: Vec::new(),
            relative_to_critical: false,
            u_points: 401,
            u_extent: 4.0,
            phi_points: 121,
            tau_points: 8001,
        }
    }
}

impl FieldSection {
    pub fn parsed_models(&self) -> Result<Vec<FreeEnergyModel>, CliError> {
        self.models
            .iter()
            .map(|m| m.parse::<FreeEnergyModel>().map_err(|e| CliError::Config(e.to_string())))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSection {
    /// Krylov propagation tolerance per unit time.
    pub tolerance: f64,
    /// Residual required of every Lanczos eigenpair.
    pub eigen_tolerance: f64,
    /// Eigenpairs requested by `ground_state`.
    pub levels: usize,
    /// Refuse runs whose estimated working set exceeds this many MiB.
    pub memory_cap_mb: f64,
}

impl Default for SolverSection {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            eigen_tolerance: 1e-8,
            levels: 4,
            memory_cap_mb: 8192.0,
        }
    }
}

/// A fully explicit run description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub kind: RunKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub units: Units,
    #[serde(default)]
    pub model: ModelSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseSection>,
    #[serde(default)]
    pub dynamics: DynamicsSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub field: FieldSection,
    #[serde(default)]
    pub solver: SolverSection,
}

impl RunConfig {
    pub fn new(kind: RunKind) -> Self {
        Self {
            kind,
            preset: None,
            output: None,
            units: Units::default(),
            model: ModelSection::default(),
            noise: None,
            dynamics: DynamicsSection::default(),
            grid: GridSection::default(),
            field: FieldSection::default(),
            solver: SolverSection::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run configs always serialize")
    }

    pub fn params(&self) -> ModelParams {
        self.model.params()
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let defaults = Units::default();
        if self.units != defaults {
            return Err(CliError::Config(format!(
                "unsupported units {:?}; expected energy = \"omega0\", noise_rates = \"Hz\", tau_rabi = \"s\"",
                self.units
            )));
        }
        self.params().validate()?;
        if let Some(noise) = &self.noise {
            noise.params()?;
        }
        let d = &self.dynamics;
        if !(d.t_final >= 0.0) || d.samples < 2 || d.steps == 0 {
            return Err(CliError::Config(
                "dynamics needs t_final >= 0, samples >= 2 and steps >= 1".into(),
            ));
        }
        if !(self.grid.extent > 0.0) || self.grid.points < 2 {
            return Err(CliError::Config("grid needs extent > 0 and at least 2 points".into()));
        }
        let f = &self.field;
        self.field.parsed_models()?;
        if f.u_points < 3 || f.phi_points < 3 || f.tau_points < 3 || !(f.u_extent > 0.0) {
            return Err(CliError::Config("field grids need at least 3 points and u_extent > 0".into()));
        }
        if f.couplings.iter().any(|g| !g.is_finite() || *g < 0.0) {
            return Err(CliError::Config("couplings must be finite and non-negative".into()));
        }
        let s = &self.solver;
        if !(s.tolerance > 0.0) || !(s.eigen_tolerance > 0.0) || s.levels == 0 || !(s.memory_cap_mb > 0.0) {
            return Err(CliError::Config(
                "solver needs positive tolerances, levels >= 1 and memory_cap_mb > 0".into(),
            ));
        }
        Ok(())
    }
}
