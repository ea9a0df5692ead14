use std::path::PathBuf;

use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_CONVERGENCE: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("estimated memory {estimate_mb:.0} MiB exceeds the cap of {cap_mb:.0} MiB")]
    Resource { estimate_mb: f64, cap_mb: f64 },

    #[error("{}: {message}", path.display())]
    Io { path: PathBuf, message: String },

    #[error(transparent)]
    Core(#[from] dicke_cat::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use dicke_cat::Error as E;
        match self {
            CliError::Config(_) | CliError::Resource { .. } | CliError::Io { .. } => EXIT_CONFIG,
            CliError::Core(e) => match e {
                E::NoConvergence { .. }
                | E::ToleranceUnreachable { .. }
                | E::PositivityViolation(_)
                | E::InsufficientPadding { .. }
                | E::NotPositive(_) => EXIT_CONVERGENCE,
                _ => EXIT_CONFIG,
            },
        }
    }
}
