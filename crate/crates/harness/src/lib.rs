//! Experiment harness for `tabkit-core`: configuration files, figure sweeps,
//! rate checks, bound verification and result files.

pub mod commands;
pub mod config;
pub mod report;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("fit failure: {0}")]
    Fit(String),
    #[error("bound verification failed: {0}")]
    Bound(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl HarnessError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Io(_) => 1,
            HarnessError::Config(_) => 2,
            HarnessError::Fit(_) => 3,
            HarnessError::Bound(_) => 4,
        }
    }
}

/// Sizes the global worker pool from `TABKIT_THREADS` when it is set.
pub fn init_threads() -> Result<(), HarnessError> {
    let Ok(v) = std::env::var("TABKIT_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| HarnessError::Config(format!("TABKIT_THREADS must be a positive integer, got `{v}`")))?;
    if n == 0 {
        return Err(HarnessError::Config("TABKIT_THREADS must be >= 1".into()));
    }
    // a pool that is already initialised keeps its size
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}
