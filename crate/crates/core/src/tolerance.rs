//! Numerical tolerances.
//!
//! Every threshold the library compares against lives in [`Tolerances`]. The
//! `strict` profile scales the whole family by 0.1.

/// The tolerance family used throughout the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Absolute asymmetry accepted (and symmetrized away) in covariance input.
    pub sym: f64,
    /// Slack below 1/2 still accepted for a symplectic eigenvalue.
    pub phys: f64,
    /// Relative tolerance on determinant and spectrum identities.
    pub det: f64,
    /// Max-norm bound on `(JV)^2 + I/4` for a state to count as pure.
    pub pure: f64,
    /// Max-norm bound on `S J S^T - J` for a matrix to count as symplectic.
    pub symp: f64,
    /// Clamp window for the determinant invariants (relative, absolute at 0).
    pub clamp: f64,
    /// Allowed excess of a fidelity above 1.
    pub fid: f64,
    /// Formula-vs-formula agreement.
    pub cross: f64,
    /// Most negative eigenvalue accepted in a Fock density matrix.
    pub psd: f64,
    /// Trace-loss budget of a truncated Fock density matrix.
    pub trunc: f64,
    /// Oracle agreement for one-mode comparisons.
    pub oracle_one_mode: f64,
    /// Oracle agreement for comparisons with two or more modes.
    pub oracle_multi_mode: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            sym: 1e-10,
            phys: 1e-9,
            det: 1e-9,
            pure: 1e-9,
            symp: 1e-9,
            clamp: 1e-9,
            fid: 1e-9,
            cross: 1e-8,
            psd: 1e-10,
            trunc: 1e-8,
            oracle_one_mode: 1e-6,
            oracle_multi_mode: 1e-4,
        }
    }
}

impl Tolerances {
    pub fn strict() -> Self {
        Self::default().scaled(0.1)
    }

    /// Multiplies every tolerance by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            sym: self.sym * factor,
            phys: self.phys * factor,
            det: self.det * factor,
            pure: self.pure * factor,
            symp: self.symp * factor,
            clamp: self.clamp * factor,
            fid: self.fid * factor,
            cross: self.cross * factor,
            psd: self.psd * factor,
            trunc: self.trunc * factor,
            oracle_one_mode: self.oracle_one_mode * factor,
            oracle_multi_mode: self.oracle_multi_mode * factor,
        }
    }

    /// Oracle agreement threshold for an `n`-mode comparison.
    pub fn oracle(&self, n: usize) -> f64 {
        if n <= 1 {
            self.oracle_one_mode
        } else {
            self.oracle_multi_mode
        }
    }
}
