//! Batch experiments over `walklab-core`: JSON configs, a content-addressed
//! cache, and the acceptance suites.

pub mod cache;
pub mod config;
pub mod tasks;
pub mod verify;

pub use config::{ConfigError, ExperimentConfig, Parsed, Task};
pub use tasks::{run_experiment, run_file, Outcome};
pub use verify::{run_suite, Suite, SuiteReport};

/// Why a command did not complete.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad arguments or config; exit code 2.
    #[error("{0}")]
    Usage(String),
    /// The computation itself failed; exit code 2.
    #[error("{0}")]
    Run(walklab_core::Error),
}

impl CliError {
    /// A hint for errors that a parameter change can fix.
    pub fn hint(&self) -> Option<&'static str> {
        match self {
            CliError::Run(walklab_core::Error::Resource(_)) => {
                Some("lower n_max or samples, raise epsilon, or pick a smaller radius or quotient")
            }
            CliError::Run(walklab_core::Error::Numeric(_)) => Some("shorten n_range or lower epsilon"),
            _ => None,
        }
    }
}
