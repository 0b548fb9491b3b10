use thiserror::Error;

/// Failure classes shared by every module of the crate.
///
/// The CLI maps each variant onto a process exit code via [`Error::exit_code`],
/// so variants are grouped by cause rather than by the module that raised them.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid mode count {0}: at least one mode is required")]
    InvalidModeCount(usize),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unphysical state: {0}")]
    Unphysical(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("matrix is not symplectic (max |S J S^T - J| = {0:.3e})")]
    NotSymplectic(f64),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("numerical inconsistency: {0}")]
    NumericalInconsistency(String),

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error(
        "cutoff {cutoff} too small: trace loss {trace_loss:.3e} exceeds budget {budget:.1e}; try --cutoff {suggested}"
    )]
    CutoffTooSmall {
        cutoff: usize,
        trace_loss: f64,
        budget: f64,
        suggested: usize,
    },

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for this failure class.
    ///
    /// 2 parse/malformed/dimension, 3 unphysical, 4 unsupported,
    /// 5 numerical inconsistency, 6 cutoff too small.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Malformed(_)
            | Error::Dimension(_)
            | Error::Parse(_)
            | Error::InvalidParameter(_)
            | Error::InvalidModeCount(_)
            | Error::InvalidCircuit(_)
            | Error::Io(_) => 2,
            Error::Unphysical(_) | Error::Domain(_) | Error::NotSymplectic(_) => 3,
            Error::Unsupported(_) => 4,
            Error::NumericalInconsistency(_) | Error::InvalidDensity(_) => 5,
            Error::CutoffTooSmall { .. } => 6,
        }
    }

    /// Short machine-friendly class name, used for CSV error markers.
    pub fn class(&self) -> &'static str {
        match self.exit_code() {
            2 => "parse",
            3 => "unphysical",
            4 => "unsupported",
            5 => "numerical",
            6 => "cutoff",
            _ => "error",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
