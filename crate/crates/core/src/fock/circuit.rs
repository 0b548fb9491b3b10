use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{GaussianState, QuadratureVector};
use crate::symplectic::{apply_symplectic, SymplecticMatrix};
use crate::tolerance::Tolerances;

/// One primitive Gaussian operation.
///
/// `Displace { q, p }` shifts the mean of `mode` by `(q, p)`, which is the
/// coherent amplitude `α = (q + i p)/√2` in Fock space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "kebab-case")]
pub enum CircuitOp {
    #[serde(rename_all = "camelCase")]
    ThermalInit { mode: usize, mean_photons: f64 },
    Squeeze {
        mode: usize,
        r: f64,
        #[serde(default)]
        phase: f64,
    },
    Rotate { mode: usize, angle: f64 },
    #[serde(rename_all = "camelCase")]
    BeamSplit {
        mode_a: usize,
        mode_b: usize,
        mix_angle: f64,
        #[serde(default)]
        phase: f64,
    },
    Displace { mode: usize, q: f64, p: f64 },
}

impl CircuitOp {
    fn modes(&self) -> Vec<usize> {
        match *self {
            Self::ThermalInit { mode, .. }
            | Self::Squeeze { mode, .. }
            | Self::Rotate { mode, .. }
            | Self::Displace { mode, .. } => vec![mode],
            Self::BeamSplit { mode_a, mode_b, .. } => vec![mode_a, mode_b],
        }
    }

    fn params(&self) -> Vec<f64> {
        match *self {
            Self::ThermalInit { mean_photons, .. } => vec![mean_photons],
            Self::Squeeze { r, phase, .. } => vec![r, phase],
            Self::Rotate { angle, .. } => vec![angle],
            Self::BeamSplit { mix_angle, phase, .. } => vec![mix_angle, phase],
            Self::Displace { q, p, .. } => vec![q, p],
        }
    }
}

/// Parameter bounds that keep photon-number tails small at moderate cutoffs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircuitLimits {
    pub max_squeeze: f64,
    pub max_mean_photons: f64,
    pub max_displacement: f64,
    pub max_mix_angle: f64,
}

impl Default for CircuitLimits {
    fn default() -> Self {
        Self {
            max_squeeze: 1.0,
            max_mean_photons: 3.0,
            max_displacement: 2.5,
            max_mix_angle: std::f64::consts::PI,
        }
    }
}

/// An `n`-mode circuit: optional thermal preparation followed by unitaries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianCircuit {
    pub n: usize,
    pub ops: Vec<CircuitOp>,
}

impl GaussianCircuit {
    /// Checks mode indices, finiteness, and that each mode is thermally
    /// initialized at most once and before any unitary touches it.
    pub fn new(n: usize, ops: Vec<CircuitOp>) -> Result<Self> {
        let c = Self { n, ops };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidModeCount(0));
        }
        let mut touched = vec![false; self.n];
        let mut initialized = vec![false; self.n];
        for (i, op) in self.ops.iter().enumerate() {
            if op.params().iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidCircuit(format!("op {i} has non-finite parameters")));
            }
            let modes = op.modes();
            if let Some(m) = modes.iter().find(|&&m| m >= self.n) {
                return Err(Error::InvalidCircuit(format!(
                    "op {i} addresses mode {m} of a {}-mode circuit",
                    self.n
                )));
            }
            match *op {
                CircuitOp::ThermalInit { mode, mean_photons } => {
                    if mean_photons < 0.0 {
                        return Err(Error::InvalidCircuit(format!("op {i}: negative meanPhotons")));
                    }
                    if initialized[mode] || touched[mode] {
                        return Err(Error::InvalidCircuit(format!(
                            "op {i}: thermal-init on mode {mode} must come first and only once"
                        )));
                    }
                    initialized[mode] = true;
                }
                CircuitOp::BeamSplit { mode_a, mode_b, .. } if mode_a == mode_b => {
                    return Err(Error::InvalidCircuit(format!("op {i}: beam splitter needs two distinct modes")));
                }
                _ => modes.iter().for_each(|&m| touched[m] = true),
            }
        }
        Ok(())
    }

    /// Rejects parameters outside `limits`.
    pub fn check_limits(&self, limits: &CircuitLimits) -> Result<()> {
        for (i, op) in self.ops.iter().enumerate() {
            let bad = match *op {
                CircuitOp::ThermalInit { mean_photons, .. } => {
                    (mean_photons > limits.max_mean_photons).then(|| format!("meanPhotons {mean_photons}"))
                }
                CircuitOp::Squeeze { r, .. } => (r.abs() > limits.max_squeeze).then(|| format!("r {r}")),
                CircuitOp::BeamSplit { mix_angle, .. } => {
                    (mix_angle.abs() > limits.max_mix_angle).then(|| format!("mixAngle {mix_angle}"))
                }
                CircuitOp::Displace { q, p, .. } => (q.abs() > limits.max_displacement
                    || p.abs() > limits.max_displacement)
                    .then(|| format!("displacement ({q}, {p})")),
                CircuitOp::Rotate { .. } => None,
            };
            if let Some(what) = bad {
                return Err(Error::InvalidCircuit(format!(
                    "op {i}: {what} outside the truncation-safe limits (use force to override)"
                )));
            }
        }
        Ok(())
    }

    pub fn thermal_kappas(&self) -> Vec<f64> {
        let mut k = vec![0.5; self.n];
        for op in &self.ops {
            if let CircuitOp::ThermalInit { mode, mean_photons } = *op {
                k[mode] = mean_photons + 0.5;
            }
        }
        k
    }
}

/// Symplectic semantics of a circuit.
pub fn circuit_to_gaussian(c: &GaussianCircuit, tol: &Tolerances) -> Result<GaussianState> {
    c.validate()?;
    let n = c.n;
    let mut state = GaussianState::thermal(&c.thermal_kappas())?;
    let zero = QuadratureVector::zeros(n);
    for op in &c.ops {
        let s = match *op {
            CircuitOp::ThermalInit { .. } => continue,
            CircuitOp::Squeeze { mode, r, phase } => SymplecticMatrix::squeeze(n, mode, r, phase)?,
            CircuitOp::Rotate { mode, angle } => SymplecticMatrix::rotation(n, mode, angle)?,
            CircuitOp::BeamSplit { mode_a, mode_b, mix_angle, phase } => {
                SymplecticMatrix::beam_splitter(n, mode_a, mode_b, mix_angle, phase)?
            }
            CircuitOp::Displace { mode, q, p } => {
                let mut shift = vec![0.0; 2 * n];
                shift[2 * mode] = q;
                shift[2 * mode + 1] = p;
                state = apply_symplectic(&state, &SymplecticMatrix::identity(n), &QuadratureVector::new(shift)?)?;
                continue;
            }
        };
        state = apply_symplectic(&state, &s, &zero)?;
    }
    state.ensure_physical(tol)?;
    Ok(state)
}
