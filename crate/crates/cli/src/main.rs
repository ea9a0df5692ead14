use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dicke_cat_cli::{preset, run, CliError, RunConfig, RunKind, EXIT_CONFIG, PRESETS};

#[derive(Debug, Parser)]
#[command(name = "dicke-cat", version, about = "Dicke-Ising cat-state simulations and figure presets")]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Named preset (fig1, fig2, fig5_7, fig4_8, free_energy_sketch, instanton_demo).
    #[arg(long, global = true)]
    preset: Option<String>,

    /// Output directory; defaults to the config's `output` or `out/<name>`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for parallel sections.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Krylov propagation tolerance and Lanczos residual.
    #[arg(long, global = true)]
    tolerance: Option<f64>,

    /// Drop the noise section (noisy_trotter then runs the unitary circuit).
    #[arg(long, global = true)]
    no_noise: bool,

    /// Memory cap in MiB for the resource guard.
    #[arg(long, global = true)]
    memory_cap_mb: Option<f64>,

    #[command(subcommand)]
    kind: Option<Kind>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Kind {
    GroundState,
    Quench,
    Trotter,
    NoisyTrotter,
    Wigner,
    FreeEnergy,
    Instanton,
    Angular,
    /// Print the preset names.
    Presets,
}

impl Kind {
    fn run_kind(self) -> Option<RunKind> {
        Some(match self {
            Kind::GroundState => RunKind::GroundState,
            Kind::Quench => RunKind::Quench,
            Kind::Trotter => RunKind::Trotter,
            Kind::NoisyTrotter => RunKind::NoisyTrotter,
            Kind::Wigner => RunKind::Wigner,
            Kind::FreeEnergy => RunKind::FreeEnergy,
            Kind::Instanton => RunKind::Instanton,
            Kind::Angular => RunKind::Angular,
            Kind::Presets => return None,
        })
    }
}

fn resolve(cli: &Cli) -> Result<(RunConfig, PathBuf), CliError> {
    let mut cfg = match (&cli.config, &cli.preset) {
        (Some(_), Some(_)) => return Err(CliError::Config("use either --config or --preset, not both".into())),
        (Some(path), None) => RunConfig::load(path)?,
        (None, Some(name)) => preset(name)?,
        (None, None) => match cli.kind.and_then(Kind::run_kind) {
            Some(kind) => RunConfig::new(kind),
            None => return Err(CliError::Config("nothing to run: give a subcommand, --config or --preset".into())),
        },
    };
    if let Some(kind) = cli.kind.and_then(Kind::run_kind) {
        cfg.kind = kind;
    }
    if let Some(tol) = cli.tolerance {
        cfg.solver.tolerance = tol;
        cfg.solver.eigen_tolerance = tol;
    }
    if let Some(cap) = cli.memory_cap_mb {
        cfg.solver.memory_cap_mb = cap;
    }
    if cli.no_noise {
        cfg.noise = None;
    }
    let out = cli
        .out
        .clone()
        .or_else(|| cfg.output.clone())
        .unwrap_or_else(|| PathBuf::from("out").join(cfg.preset.clone().unwrap_or_else(|| cfg.kind.to_string())));
    cfg.validate()?;
    Ok((cfg, out))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if matches!(cli.kind, Some(Kind::Presets)) {
        for name in PRESETS {
            println!("{name}");
        }
        return ExitCode::SUCCESS;
    }
    if let Some(threads) = cli.threads {
        if threads == 0 || rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().is_err() {
            eprintln!("error: cannot start a pool of {threads} threads");
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    }
    let result = resolve(&cli).and_then(|(cfg, out)| run(&cfg, &out).map(|b| (b, out)));
    match result {
        Ok((bundle, out)) => {
            println!("{} run written to {}", bundle.kind, out.display());
            for f in &bundle.files {
                println!("  {}  {}", f.sha256, f.name);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
