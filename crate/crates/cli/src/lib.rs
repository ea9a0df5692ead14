//! Command-line plumbing for the `dicke-cat` simulators: TOML run
//! configurations, figure presets, CSV emission and run manifests.

pub mod config;
pub mod emit;
pub mod error;
pub mod presets;
pub mod runs;

pub use config::{RunConfig, RunKind};
pub use emit::ResultBundle;
pub use error::{CliError, EXIT_CONFIG, EXIT_CONVERGENCE, EXIT_OK};
pub use presets::{preset, PRESETS};
pub use runs::{estimate_memory_mb, run};
