use std::fmt;

use eld::eld::{EldError, DEFAULT_K, DEFAULT_P};
use eld::graph::DEFAULT_SPARSE_THRESHOLD;
use eld::io::MatrixFormat;
use eld::{EldParams, LaplacianKind, SolverOptions, SpectralError};

/// Settings shared by every subcommand.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub k: usize,
    pub p: f64,
    pub mode: LaplacianKind,
    pub skip_first: bool,
    pub sparse_threshold: usize,
    pub seed: Option<u64>,
    pub format: MatrixFormat,
    pub threads: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            k: DEFAULT_K,
            p: DEFAULT_P,
            mode: LaplacianKind::Combinatorial,
            skip_first: false,
            sparse_threshold: DEFAULT_SPARSE_THRESHOLD,
            seed: None,
            format: MatrixFormat::Csv,
            threads: None,
        }
    }
}

impl RunConfig {
    pub fn params(&self) -> EldParams {
        EldParams {
            k: self.k,
            p: self.p,
            mode: self.mode,
            skip_first: self.skip_first,
            solver: SolverOptions {
                sparse_threshold: self.sparse_threshold,
                ..SolverOptions::default()
            },
            ..EldParams::default()
        }
    }

    pub fn validate(&self) -> Result<(), Failure> {
        self.params().validate().map_err(Failure::from)?;
        if self.threads == Some(0) {
            return Err(Failure::Usage("--threads must be at least 1".into()));
        }
        Ok(())
    }
}

/// An error together with the process exit code it maps to.
#[derive(Debug, Clone, PartialEq)]
pub enum Failure {
    Usage(String),
    Input(String),
    Numerical(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Input(_) => 3,
            Failure::Numerical(_) => 4,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Input(m) | Failure::Numerical(m) => f.write_str(m),
        }
    }
}

impl From<EldError> for Failure {
    fn from(e: EldError) -> Self {
        let msg = e.to_string();
        match e {
            EldError::KTooLarge { .. }
            | EldError::ZeroK
            | EldError::InvalidOrder(_)
            | EldError::LabelCount { .. }
            | EldError::Spectral(SpectralError::KTooLarge { .. })
            | EldError::Spectral(SpectralError::ZeroK) => Failure::Usage(msg),
            EldError::Spectral(_) | EldError::Transport(_) => Failure::Numerical(msg),
        }
    }
}
