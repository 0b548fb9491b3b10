//! Closed-form Uhlmann fidelity between Gaussian states.
//!
//! Everything here is expressed through the two covariance matrices `V'`,
//! `V''` and the mean difference `δ = <u>' - <u>''`. The one- and two-mode
//! formulas depend on the pair only through the determinant invariants
//!
//! ```text
//! Δ = det(V' + V'')
//! Γ = 4^n det[(JV')(JV'') - I/4]
//! Λ = 4^n det(V' + iJ/2) det(V'' + iJ/2)
//! ```
//!
//! and the displacement factor `exp(-δᵀ (V'+V'')⁻¹ δ / 2)`. Both formulas are
//! evaluated in rationalized form so that no difference of nearly equal
//! numbers is formed as the fidelity approaches 1.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{is_pure, GaussianState, StandardFormParams};
use crate::symplectic::{symplectic_eigenvalues, symplectic_form};
use crate::tolerance::Tolerances;

/// Complex Gaussian kernel `exp(-(u - ξ)ᵀ F (u - ξ)/2)` with prefactor `exp(log_norm)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexGaussianKernel {
    pub n: usize,
    pub f: DMatrix<Complex64>,
    pub xi: DVector<Complex64>,
    pub log_norm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvariantTriple {
    pub delta: f64,
    pub gamma: f64,
    pub lambda: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FidelityMethod {
    OneMode,
    TwoMode,
    Commuting,
    PureShortcut,
}

impl FidelityMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::OneMode => "one-mode",
            Self::TwoMode => "two-mode",
            Self::Commuting => "commuting",
            Self::PureShortcut => "pure-shortcut",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FidelityReport {
    pub fidelity: f64,
    pub overlap: f64,
    pub displacement_factor: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub invariants: Option<InvariantTriple>,
    pub bures_distance: f64,
    pub method: FidelityMethod,
}

impl FidelityReport {
    fn build(
        fidelity: f64,
        overlap: f64,
        displacement_factor: f64,
        invariants: Option<InvariantTriple>,
        method: FidelityMethod,
        tol: &Tolerances,
    ) -> Result<Self> {
        if !fidelity.is_finite() || fidelity <= 0.0 || fidelity > 1.0 + tol.fid {
            return Err(Error::NumericalInconsistency(format!(
                "fidelity {fidelity} outside (0, 1 + {:.0e}]",
                tol.fid
            )));
        }
        Ok(Self {
            fidelity,
            overlap,
            displacement_factor,
            invariants,
            bures_distance: bures_distance(fidelity),
            method,
        })
    }
}

fn check_pair(s1: &GaussianState, s2: &GaussianState) -> Result<usize> {
    if s1.n() != s2.n() {
        return Err(Error::Dimension(format!(
            "states have different mode counts ({} and {})",
            s1.n(),
            s2.n()
        )));
    }
    Ok(s1.n())
}

fn complexify(m: &DMatrix<f64>) -> DMatrix<Complex64> {
    m.map(|x| Complex64::new(x, 0.0))
}

/// `V + (i/2) J` as a complex matrix.
fn plus_half_j(v: &DMatrix<f64>, j: &DMatrix<f64>, sign: f64) -> DMatrix<Complex64> {
    DMatrix::from_fn(v.nrows(), v.ncols(), |r, c| Complex64::new(v[(r, c)], 0.5 * sign * j[(r, c)]))
}

/// Cholesky-based `(log det Σ, Σ⁻¹δ)` with `Σ = V' + V''`.
fn sum_solve(s1: &GaussianState, s2: &GaussianState) -> Result<(f64, DMatrix<f64>, DVector<f64>)> {
    let sum = s1.cov().matrix() + s2.cov().matrix();
    let chol = sum.clone().cholesky().ok_or_else(|| {
        Error::NumericalInconsistency("V' + V'' is not positive definite".into())
    })?;
    let log_det = 2.0 * chol.l().diagonal().iter().map(|x| x.ln()).sum::<f64>();
    let delta = s1.mean().as_vector() - s2.mean().as_vector();
    let sol = chol.solve(&delta);
    Ok((log_det, chol.inverse(), DVector::from(sol)))
}

/// `exp(-δᵀ (V'+V'')⁻¹ δ / 2)`.
pub fn displacement_factor(s1: &GaussianState, s2: &GaussianState) -> Result<f64> {
    check_pair(s1, s2)?;
    let (_, _, sol) = sum_solve(s1, s2)?;
    let delta = s1.mean().as_vector() - s2.mean().as_vector();
    Ok((-0.5 * delta.dot(&sol)).exp())
}

/// `Tr ρ'ρ'' = det(V'+V'')^{-1/2} exp(-δᵀ (V'+V'')⁻¹ δ / 2)`.
pub fn overlap(s1: &GaussianState, s2: &GaussianState) -> Result<f64> {
    check_pair(s1, s2)?;
    Ok(log_overlap(s1, s2)?.exp())
}

fn log_overlap(s1: &GaussianState, s2: &GaussianState) -> Result<f64> {
    let (log_det, _, sol) = sum_solve(s1, s2)?;
    let delta = s1.mean().as_vector() - s2.mean().as_vector();
    Ok(-0.5 * log_det - 0.5 * delta.dot(&sol))
}

/// Kernel of the operator product `ρ'ρ''`:
///
/// ```text
/// F = -(i/2)J + (V'' + (i/2)J)(V'+V'')⁻¹(V' + (i/2)J)
/// ξ = <u>' - (V' - (i/2)J)(V'+V'')⁻¹ δ
/// ```
pub fn product_kernel(s1: &GaussianState, s2: &GaussianState) -> Result<ComplexGaussianKernel> {
    let n = check_pair(s1, s2)?;
    let j = symplectic_form(n)?;
    let (_, inv, sol) = sum_solve(s1, s2)?;
    let inv = complexify(&inv);
    let a = plus_half_j(s2.cov().matrix(), &j, 1.0);
    let b = plus_half_j(s1.cov().matrix(), &j, 1.0);
    let mut f = a * inv * b;
    for r in 0..2 * n {
        for c in 0..2 * n {
            f[(r, c)] -= Complex64::new(0.0, 0.5 * j[(r, c)]);
        }
    }
    let f = (&f + f.transpose()) * Complex64::new(0.5, 0.0);
    let m = plus_half_j(s1.cov().matrix(), &j, -1.0);
    let xi = s1.mean().as_vector().map(|x| Complex64::new(x, 0.0)) - m * sol.map(|x| Complex64::new(x, 0.0));
    Ok(ComplexGaussianKernel { n, f, xi, log_norm: log_overlap(s1, s2)? })
}

/// Raw determinant invariants, without clamping.
fn raw_invariants(s1: &GaussianState, s2: &GaussianState, tol: &Tolerances) -> Result<InvariantTriple> {
    let n = s1.n();
    let j = symplectic_form(n)?;
    let (v1, v2) = (s1.cov().matrix(), s2.cov().matrix());
    let scale = 4f64.powi(n as i32);
    let delta = (v1 + v2).determinant();
    let m = (&j * v1) * (&j * v2) - DMatrix::identity(2 * n, 2 * n) * 0.25;
    let gamma = scale * m.determinant();
    let mut lambda = scale;
    for v in [v1, v2] {
        let d = plus_half_j(v, &j, 1.0).determinant();
        let mag = v.amax().powi(2 * n as i32).max(1.0);
        if d.im.abs() > tol.det * mag {
            return Err(Error::NumericalInconsistency(format!(
                "det(V + iJ/2) has imaginary residue {:.3e}",
                d.im
            )));
        }
        lambda *= d.re;
    }
    Ok(InvariantTriple { delta, gamma, lambda })
}

fn clamp_invariants(t: InvariantTriple, tol: &Tolerances) -> Result<InvariantTriple> {
    let InvariantTriple { mut delta, mut gamma, mut lambda } = t;
    if delta < 1.0 {
        if delta < 1.0 - tol.clamp {
            return Err(Error::NumericalInconsistency(format!("Δ = {delta} < 1")));
        }
        delta = 1.0;
    }
    if gamma < delta {
        if gamma < delta * (1.0 - tol.clamp) {
            return Err(Error::NumericalInconsistency(format!("Γ = {gamma} < Δ = {delta}")));
        }
        gamma = delta;
    }
    if lambda < 0.0 {
        if lambda < -tol.clamp {
            return Err(Error::NumericalInconsistency(format!("Λ = {lambda} < 0")));
        }
        lambda = 0.0;
    }
    Ok(InvariantTriple { delta, gamma, lambda })
}

/// `(Δ, Γ, Λ)` for a one- or two-mode pair, clamped to `Δ ≥ 1`, `Γ ≥ Δ`,
/// `Λ ≥ 0` when within `tol.clamp` of the bound.
pub fn invariant_triple(s1: &GaussianState, s2: &GaussianState, tol: &Tolerances) -> Result<InvariantTriple> {
    let n = check_pair(s1, s2)?;
    if n > 2 {
        return Err(Error::Unsupported(format!(
            "determinant invariants do not fix the fidelity for {n} modes"
        )));
    }
    clamp_invariants(raw_invariants(s1, s2, tol)?, tol)
}

/// Invariants with the pure-input identities `Λ = 0`, `Γ = Δ` imposed exactly.
///
/// Without this, round-off of order 1e-16 in `Λ` enters the fidelity as
/// `sqrt(Λ) ~ 1e-8`. `Λ` also vanishes when only some mode of an input is
/// pure, since `det(V + iJ/2) = ∏ (κ_j² - 1/4)`.
fn fidelity_invariants(s1: &GaussianState, s2: &GaussianState, tol: &Tolerances) -> Result<InvariantTriple> {
    let mut t = invariant_triple(s1, s2, tol)?;
    if is_pure(s1, tol).pure || is_pure(s2, tol).pure {
        t.lambda = 0.0;
        t.gamma = t.delta;
    } else if has_pure_mode(s1, tol)? || has_pure_mode(s2, tol)? {
        t.lambda = 0.0;
    }
    Ok(t)
}

fn has_pure_mode(s: &GaussianState, tol: &Tolerances) -> Result<bool> {
    Ok(symplectic_eigenvalues(s.cov(), tol)?.min() - 0.5 <= tol.pure)
}

/// `F = e_δ (sqrt(Δ+Λ) + sqrt(Λ)) / Δ`.
pub fn fidelity_one_mode(s1: &GaussianState, s2: &GaussianState, tol: &Tolerances) -> Result<FidelityReport> {
    if check_pair(s1, s2)? != 1 {
        return Err(Error::Dimension(format!("one-mode formula applied to {} modes", s1.n())));
    }
    let t = fidelity_invariants(s1, s2, tol)?;
    let disp = displacement_factor(s1, s2)?;
    let f = disp * ((t.delta + t.lambda).sqrt() + t.lambda.sqrt()) / t.delta;
    FidelityReport::build(f, overlap(s1, s2)?, disp, Some(t), FidelityMethod::OneMode, tol)
}

/// `F = e_δ [(√Γ+√Λ) + sqrt((√Γ+√Λ)² - Δ)] / Δ`.
pub fn fidelity_two_mode(s1: &GaussianState, s2: &GaussianState, tol: &Tolerances) -> Result<FidelityReport> {
    if check_pair(s1, s2)? != 2 {
        return Err(Error::Dimension(format!("two-mode formula applied to {} modes", s1.n())));
    }
    let t = fidelity_invariants(s1, s2, tol)?;
    let disp = displacement_factor(s1, s2)?;
    let f = disp * two_mode_factor(&t, tol)?;
    FidelityReport::build(f, overlap(s1, s2)?, disp, Some(t), FidelityMethod::TwoMode, tol)
}

/// Relative size of the rounding noise left in `(√Γ+√Λ)² - Δ` after the
/// determinants are formed.
const RADICAND_NOISE: f64 = 64.0 * f64::EPSILON;

fn two_mode_factor(t: &InvariantTriple, tol: &Tolerances) -> Result<f64> {
    let s = t.gamma.sqrt() + t.lambda.sqrt();
    let mut rad = s * s - t.delta;
    // Below the noise floor the square root would turn rounding of order
    // 1e-15 into a fidelity error of order 1e-8.
    if rad.abs() <= RADICAND_NOISE * t.gamma.max(t.delta) {
        rad = 0.0;
    }
    if rad < 0.0 {
        if rad < -tol.clamp * t.delta {
            return Err(Error::NumericalInconsistency(format!(
                "two-mode radicand (√Γ+√Λ)² - Δ = {rad:.3e} is negative"
            )));
        }
        rad = 0.0;
    }
    Ok((s + rad.sqrt()) / t.delta)
}

/// Symplectic eigenvalue of `ρ_B` for a commuting pair: `(κ'κ'' + 1/4)/(κ' + κ'')`.
pub fn commuting_kappa_b(k1: f64, k2: f64) -> f64 {
    (k1 * k2 + 0.25) / (k1 + k2)
}

/// Fidelity of a commuting pair from its paired spectra.
///
/// `k1[j]` and `k2[j]` must belong to the same common symplectic eigenmode;
/// sorted spectra of two states are in general *not* paired this way.
pub fn fidelity_commuting(k1: &[f64], k2: &[f64], displacement_factor: f64) -> Result<f64> {
    if k1.len() != k2.len() {
        return Err(Error::Dimension(format!(
            "spectra have different lengths ({} and {})",
            k1.len(),
            k2.len()
        )));
    }
    if k1.is_empty() {
        return Err(Error::InvalidModeCount(0));
    }
    let per_mode = k1.iter().zip(k2).map(|(&a, &b)| {
        let rad = ((a * a - 0.25) * (b * b - 0.25)).max(0.0);
        2.0 / (a + b).powi(2) * (a * b + 0.25 + rad.sqrt())
    });
    Ok(displacement_factor * per_mode.product::<f64>())
}

/// `F = Tr(ρ'ρ'') 2ⁿ ∏_j (κ_Bj + sqrt(κ_Bj² - 1/4))`, the general expression
/// in terms of the spectrum of `ρ_B`.
pub fn fidelity_from_kappa_b(overlap: f64, kappa_b: &[f64]) -> f64 {
    kappa_b
        .iter()
        .map(|&k| 2.0 * (k + (k * k - 0.25).max(0.0).sqrt()))
        .fold(overlap, |acc, x| acc * x)
}

/// Per-mode `κ` of a covariance matrix that is diagonal with equal q/p
/// variances on each mode, or `None` otherwise.
fn williamson_diagonal(s: &GaussianState, tol: &Tolerances) -> Option<Vec<f64>> {
    let v = s.cov().matrix();
    let dim = v.nrows();
    for r in 0..dim {
        for c in 0..dim {
            if r != c && v[(r, c)].abs() > tol.sym {
                return None;
            }
        }
    }
    (0..s.n())
        .map(|k| {
            let (q, p) = (v[(2 * k, 2 * k)], v[(2 * k + 1, 2 * k + 1)]);
            ((q - p).abs() <= tol.sym).then_some(0.5 * (q + p))
        })
        .collect()
}

/// Fidelity of two Gaussian states, choosing the closed form that applies.
///
/// Order of preference: pure input (fidelity equals the overlap), one mode,
/// two modes, commuting Williamson-diagonal inputs. Mixed non-commuting
/// pairs with three or more modes are [`Error::Unsupported`].
pub fn fidelity(s1: &GaussianState, s2: &GaussianState, tol: &Tolerances) -> Result<FidelityReport> {
    let n = check_pair(s1, s2)?;
    s1.ensure_physical(tol)?;
    s2.ensure_physical(tol)?;
    if is_pure(s1, tol).pure || is_pure(s2, tol).pure {
        let ov = overlap(s1, s2)?;
        let invariants = if n <= 2 { Some(fidelity_invariants(s1, s2, tol)?) } else { None };
        let disp = displacement_factor(s1, s2)?;
        return FidelityReport::build(ov, ov, disp, invariants, FidelityMethod::PureShortcut, tol);
    }
    match n {
        1 => fidelity_one_mode(s1, s2, tol),
        2 => fidelity_two_mode(s1, s2, tol),
        _ => match (williamson_diagonal(s1, tol), williamson_diagonal(s2, tol)) {
            (Some(k1), Some(k2)) => {
                let disp = displacement_factor(s1, s2)?;
                let f = fidelity_commuting(&k1, &k2, disp)?;
                FidelityReport::build(f, overlap(s1, s2)?, disp, None, FidelityMethod::Commuting, tol)
            }
            _ => Err(Error::Unsupported(format!(
                "no closed form for mixed non-commuting {n}-mode states (only n <= 2, pure, or commuting inputs)"
            ))),
        },
    }
}

/// Residuals of the determinant identities for the operator `ρ_B`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetIdentityResiduals {
    /// `det V_B = Γ/(4ⁿΔ)`.
    pub det_vb: f64,
    /// `det(V_B + iJ/2) = Λ/(4ⁿΔ)`.
    pub det_vb_shifted: f64,
    /// `det V_B - 4⁻ⁿ`, non-negative for valid pairs and zero when one input is pure.
    pub purity_margin: f64,
    /// Relative mismatch between `det F_A` and `Γ/(4ⁿΔ)`.
    pub det_f: f64,
    /// Relative mismatch between `det(F_A + iJ/2)` and `Λ/(4ⁿΔ)`.
    pub det_f_shifted: f64,
    /// `|Γ - Δ - Λ| / Γ`, only for one mode.
    pub one_mode_sum: Option<f64>,
}

pub fn det_identities_check(s1: &GaussianState, s2: &GaussianState, tol: &Tolerances) -> Result<DetIdentityResiduals> {
    let t = invariant_triple(s1, s2, tol)?;
    let n = s1.n();
    let scale = 4f64.powi(n as i32);
    let det_vb = t.gamma / (scale * t.delta);
    let det_vb_shifted = t.lambda / (scale * t.delta);
    let k = product_kernel(s1, s2)?;
    let j = symplectic_form(n)?;
    let det_fa = k.f.determinant();
    let shifted = &k.f + j.map(|x| Complex64::new(0.0, 0.5 * x));
    let det_fa_shifted = shifted.determinant();
    let rel = |z: Complex64, x: f64| (z - x).norm() / x.abs().max(1.0 / scale);
    Ok(DetIdentityResiduals {
        det_vb,
        det_vb_shifted,
        purity_margin: det_vb - 1.0 / scale,
        det_f: rel(det_fa, det_vb),
        det_f_shifted: rel(det_fa_shifted, det_vb_shifted),
        one_mode_sum: (n == 1).then(|| (t.gamma - t.delta - t.lambda).abs() / t.gamma),
    })
}

/// `(Δ, Γ, Λ)` from two sets of standard-form parameters via the factored
/// expressions; no determinant is evaluated.
pub fn invariants_standard_form(p1: &StandardFormParams, p2: &StandardFormParams) -> InvariantTriple {
    let (b1, b2) = (p1.b1 + p2.b1, p1.b2 + p2.b2);
    let delta = (b1 * b2 - (p1.c + p2.c).powi(2)) * (b1 * b2 - (p1.d + p2.d).powi(2));
    let g1 = (p1.b1 * p1.b2 - p1.d * p1.d) * (p2.b1 * p2.b2 - p2.c * p2.c)
        + 0.25 * (p1.b1 * p2.b1 + p1.b2 * p2.b2 + 2.0 * p1.d * p2.c)
        + 1.0 / 16.0;
    let g2 = (p1.b1 * p1.b2 - p1.c * p1.c) * (p2.b1 * p2.b2 - p2.d * p2.d)
        + 0.25 * (p1.b1 * p2.b1 + p1.b2 * p2.b2 + 2.0 * p1.c * p2.d)
        + 1.0 / 16.0;
    InvariantTriple {
        delta,
        gamma: 16.0 * g1 * g2,
        lambda: 16.0 * p1.det_plus_half_j() * p2.det_plus_half_j(),
    }
}

/// `sqrt(2 - 2 sqrt(F))`, with `F` capped at 1.
pub fn bures_distance(fidelity: f64) -> f64 {
    (2.0 - 2.0 * fidelity.min(1.0).sqrt()).max(0.0).sqrt()
}
