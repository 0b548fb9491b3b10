use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{circuit_to_gaussian, CircuitOp, GaussianCircuit};
use crate::state::{
    standard_form_cm, validate_state, CovarianceMatrix, GaussianState, QuadratureVector, StandardFormParams,
    ValidationReport,
};
use crate::tolerance::Tolerances;

/// On-disk description of a state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum StateDocument {
    Gaussian {
        n: usize,
        mean: Vec<f64>,
        /// Row-major.
        cov: Vec<Vec<f64>>,
    },
    StandardForm {
        b1: f64,
        b2: f64,
        c: f64,
        d: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mean: Option<Vec<f64>>,
    },
    Circuit {
        n: usize,
        ops: Vec<CircuitOp>,
    },
}

/// A parsed state together with its validation verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedState {
    pub state: GaussianState,
    pub report: ValidationReport,
    pub document: StateDocument,
}

impl ParsedState {
    /// The state, or [`Error::Unphysical`] if validation failed.
    pub fn into_physical(self) -> Result<GaussianState> {
        match self.report.failure {
            None => Ok(self.state),
            Some(f) => Err(Error::Unphysical(f.to_string())),
        }
    }
}

impl StateDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents always serialize")
    }

    /// Gaussian-kind document holding `s` verbatim.
    pub fn from_state(s: &GaussianState) -> Self {
        let v = s.cov().matrix();
        StateDocument::Gaussian {
            n: s.n(),
            mean: s.mean().to_vec(),
            cov: (0..v.nrows()).map(|r| v.row(r).iter().copied().collect()).collect(),
        }
    }

    pub fn as_circuit(&self) -> Option<GaussianCircuit> {
        match self {
            StateDocument::Circuit { n, ops } => Some(GaussianCircuit { n: *n, ops: ops.clone() }),
            _ => None,
        }
    }

    /// Builds and validates the state. An unphysical covariance matrix is
    /// reported in the verdict, not as an error.
    pub fn to_state(&self, tol: &Tolerances) -> Result<(GaussianState, ValidationReport)> {
        match self {
            StateDocument::Gaussian { n, mean, cov } => {
                if *n == 0 {
                    return Err(Error::InvalidModeCount(0));
                }
                let dim = 2 * n;
                if mean.len() != dim {
                    return Err(Error::Dimension(format!("n = {n} needs a mean of length {dim}, got {}", mean.len())));
                }
                if cov.len() != dim || cov.iter().any(|row| row.len() != dim) {
                    return Err(Error::Dimension(format!("n = {n} needs a {dim}x{dim} covariance matrix")));
                }
                let mat = DMatrix::from_fn(dim, dim, |r, c| cov[r][c]);
                if mat.iter().any(|x| !x.is_finite()) {
                    return Err(Error::Malformed("covariance matrix has non-finite entries".into()));
                }
                let cov = CovarianceMatrix::with_tolerance(mat, tol)?;
                let state = GaussianState::new(QuadratureVector::new(mean.clone())?, cov)?;
                let report = validate_state(&state, tol)?;
                Ok((state, report))
            }
            StateDocument::StandardForm { b1, b2, c, d, mean } => {
                let p = StandardFormParams::new(*b1, *b2, *c, *d)?;
                let (cov, report) = standard_form_cm(&p, tol)?;
                let mean = match mean {
                    Some(m) if m.len() != 4 => {
                        return Err(Error::Dimension(format!("standard-form mean needs 4 entries, got {}", m.len())))
                    }
                    Some(m) => QuadratureVector::new(m.clone())?,
                    None => QuadratureVector::zeros(2),
                };
                Ok((GaussianState::new(mean, cov)?, report))
            }
            StateDocument::Circuit { .. } => {
                let c = self.as_circuit().expect("circuit kind");
                let state = circuit_to_gaussian(&c, tol)?;
                let report = validate_state(&state, tol)?;
                Ok((state, report))
            }
        }
    }
}

/// Parses a JSON state document and validates the result.
pub fn parse_state(text: &str, tol: &Tolerances) -> Result<ParsedState> {
    let document = StateDocument::from_json(text)?;
    let (state, report) = document.to_state(tol)?;
    Ok(ParsedState { state, report, document })
}
