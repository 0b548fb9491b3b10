//! Gaussian-state data types and physicality checks.
//!
//! Conventions used everywhere in the crate:
//!
//! * quadratures are interleaved, `(q1, p1, q2, p2, ...)`;
//! * `hbar = 1` and the vacuum has quadrature variance 1/2, so a covariance
//!   matrix is physical iff every symplectic eigenvalue is at least 1/2.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symplectic::{symplectic_eigenvalues, symplectic_form};
use crate::tolerance::Tolerances;

/// Mean quadrature vector of an `n`-mode state, `2n` finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureVector(DVector<f64>);

impl QuadratureVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() || entries.len() % 2 != 0 {
            return Err(Error::Dimension(format!(
                "quadrature vector needs an even, positive length, got {}",
                entries.len()
            )));
        }
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::Malformed("quadrature vector has non-finite entries".into()));
        }
        Ok(Self(DVector::from_vec(entries)))
    }

    pub fn zeros(n: usize) -> Self {
        Self(DVector::zeros(2 * n))
    }

    pub fn n(&self) -> usize {
        self.0.len() / 2
    }

    pub fn as_vector(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.0.iter().copied().collect()
    }

    pub(crate) fn from_vector(v: DVector<f64>) -> Self {
        Self(v)
    }
}

/// Real symmetric `2n x 2n` covariance matrix.
///
/// Construction enforces finiteness and symmetry only; physicality is a
/// separate question answered by [`validate_state`].
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    n: usize,
    mat: DMatrix<f64>,
}

impl CovarianceMatrix {
    /// Builds a covariance matrix with the default symmetry tolerance.
    pub fn new(mat: DMatrix<f64>) -> Result<Self> {
        Self::with_tolerance(mat, &Tolerances::default())
    }

    /// Input asymmetry up to `tol.sym` is averaged away; anything larger is
    /// rejected as malformed.
    pub fn with_tolerance(mat: DMatrix<f64>, tol: &Tolerances) -> Result<Self> {
        let (r, c) = mat.shape();
        if r != c || r == 0 || r % 2 != 0 {
            return Err(Error::Dimension(format!(
                "covariance matrix must be 2n x 2n, got {r} x {c}"
            )));
        }
        if mat.iter().any(|x| !x.is_finite()) {
            return Err(Error::Malformed("covariance matrix has non-finite entries".into()));
        }
        let asym = max_asymmetry(&mat);
        if asym > tol.sym {
            return Err(Error::Malformed(format!(
                "covariance matrix is not symmetric (max |V - V^T| = {asym:.3e} > {:.1e})",
                tol.sym
            )));
        }
        Ok(Self::symmetrized(mat))
    }

    /// Averages `mat` with its transpose. Used for matrices that are symmetric
    /// by construction up to round-off.
    pub(crate) fn symmetrized(mat: DMatrix<f64>) -> Self {
        let n = mat.nrows() / 2;
        let mat = (&mat + mat.transpose()) * 0.5;
        Self { n, mat }
    }

    pub fn vacuum(n: usize) -> Self {
        Self { n, mat: DMatrix::identity(2 * n, 2 * n) * 0.5 }
    }

    /// Williamson-diagonal matrix `diag(k1, k1, k2, k2, ...)`.
    pub fn thermal(kappas: &[f64]) -> Result<Self> {
        if kappas.is_empty() {
            return Err(Error::InvalidModeCount(0));
        }
        let diag: Vec<f64> = kappas.iter().flat_map(|&k| [k, k]).collect();
        Self::new(DMatrix::from_diagonal(&DVector::from_vec(diag)))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.mat
    }

    pub fn determinant(&self) -> f64 {
        self.mat.determinant()
    }
}

pub(crate) fn max_asymmetry(mat: &DMatrix<f64>) -> f64 {
    let n = mat.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((mat[(i, j)] - mat[(j, i)]).abs());
        }
    }
    worst
}

/// A Gaussian state: first and second moments of the quadratures.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    mean: QuadratureVector,
    cov: CovarianceMatrix,
}

impl GaussianState {
    pub fn new(mean: QuadratureVector, cov: CovarianceMatrix) -> Result<Self> {
        if mean.n() != cov.n() {
            return Err(Error::Dimension(format!(
                "mean has {} modes but covariance has {}",
                mean.n(),
                cov.n()
            )));
        }
        Ok(Self { mean, cov })
    }

    /// Convenience constructor from raw parts.
    pub fn from_parts(mean: Vec<f64>, cov: DMatrix<f64>) -> Result<Self> {
        Self::new(QuadratureVector::new(mean)?, CovarianceMatrix::new(cov)?)
    }

    pub fn vacuum(n: usize) -> Self {
        Self { mean: QuadratureVector::zeros(n), cov: CovarianceMatrix::vacuum(n) }
    }

    /// Undisplaced product of thermal modes with symplectic eigenvalues `kappas`.
    pub fn thermal(kappas: &[f64]) -> Result<Self> {
        let cov = CovarianceMatrix::thermal(kappas)?;
        Ok(Self { mean: QuadratureVector::zeros(cov.n()), cov })
    }

    /// Same covariance, new mean.
    pub fn displaced_to(&self, mean: Vec<f64>) -> Result<Self> {
        Self::new(QuadratureVector::new(mean)?, self.cov.clone())
    }

    pub fn n(&self) -> usize {
        self.cov.n()
    }

    pub fn mean(&self) -> &QuadratureVector {
        &self.mean
    }

    pub fn cov(&self) -> &CovarianceMatrix {
        &self.cov
    }

    /// Validates the state, turning an unphysical verdict into an error.
    pub fn ensure_physical(&self, tol: &Tolerances) -> Result<ValidationReport> {
        let report = validate_state(self, tol)?;
        match &report.failure {
            None => Ok(report),
            Some(f) => Err(Error::Unphysical(f.to_string())),
        }
    }
}

/// Symplectic eigenvalues in descending order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymplecticSpectrum(Vec<f64>);

impl SymplecticSpectrum {
    /// Sorts the values into descending order.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidModeCount(0));
        }
        if values.iter().any(|v| !v.is_finite() || *v <= 0.0) {
            return Err(Error::Domain("symplectic eigenvalues must be positive and finite".into()));
        }
        values.sort_by(|a, b| b.total_cmp(a));
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn min(&self) -> f64 {
        *self.0.last().expect("spectrum is never empty")
    }

    /// `prod_j kappa_j^2`, which equals `det V`.
    pub fn determinant(&self) -> f64 {
        self.0.iter().map(|k| k * k).product()
    }
}

/// Parameters of a two-mode covariance matrix in standard form:
/// diagonal blocks `b1 I`, `b2 I` and correlation block `diag(c, d)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StandardFormParams {
    pub b1: f64,
    pub b2: f64,
    pub c: f64,
    pub d: f64,
}

impl StandardFormParams {
    /// Requires `b1, b2 >= 1/2` and `c >= |d|`.
    pub fn new(b1: f64, b2: f64, c: f64, d: f64) -> Result<Self> {
        let p = Self { b1, b2, c, d };
        p.check()?;
        Ok(p)
    }

    pub fn check(&self) -> Result<()> {
        let Self { b1, b2, c, d } = *self;
        if ![b1, b2, c, d].iter().all(|x| x.is_finite()) {
            return Err(Error::Malformed("standard-form parameters must be finite".into()));
        }
        if b1 < 0.5 || b2 < 0.5 {
            return Err(Error::InvalidParameter(format!(
                "standard form needs b1, b2 >= 1/2 (got b1 = {b1}, b2 = {b2})"
            )));
        }
        if c < d.abs() {
            return Err(Error::InvalidParameter(format!(
                "standard form needs c >= |d| (got c = {c}, d = {d})"
            )));
        }
        Ok(())
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        let Self { b1, b2, c, d } = *self;
        DMatrix::from_row_slice(
            4,
            4,
            &[
                b1, 0.0, c, 0.0, //
                0.0, b1, 0.0, d, //
                c, 0.0, b2, 0.0, //
                0.0, d, 0.0, b2,
            ],
        )
    }

    /// `det V = (b1 b2 - c^2)(b1 b2 - d^2)`.
    pub fn det(&self) -> f64 {
        let Self { b1, b2, c, d } = *self;
        (b1 * b2 - c * c) * (b1 * b2 - d * d)
    }

    /// `det(V + (i/2) J) = det V - (b1^2 + b2^2 + 2cd)/4 + 1/16`.
    pub fn det_plus_half_j(&self) -> f64 {
        let Self { b1, b2, c, d } = *self;
        self.det() - 0.25 * (b1 * b1 + b2 * b2 + 2.0 * c * d) + 1.0 / 16.0
    }
}

/// Builds the standard-form covariance matrix and reports whether it is
/// physical. Unphysical parameters are not an error.
pub fn standard_form_cm(
    p: &StandardFormParams,
    tol: &Tolerances,
) -> Result<(CovarianceMatrix, ValidationReport)> {
    let cov = CovarianceMatrix::new(p.matrix())?;
    let state = GaussianState::new(QuadratureVector::zeros(2), cov.clone())?;
    let report = validate_state(&state, tol)?;
    Ok((cov, report))
}

/// Why a state failed validation.
#[derive(Debug, Clone, PartialEq)]
pub enum ValidationFailure {
    Asymmetric { max_asymmetry: f64 },
    NotPositiveDefinite { min_eigenvalue: f64 },
    UncertaintyViolated { min_kappa: f64 },
}

impl fmt::Display for ValidationFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Asymmetric { max_asymmetry } => {
                write!(f, "covariance matrix asymmetric by {max_asymmetry:.3e}")
            }
            Self::NotPositiveDefinite { min_eigenvalue } => write!(
                f,
                "covariance matrix not positive definite (min eigenvalue {min_eigenvalue:.6e})"
            ),
            Self::UncertaintyViolated { min_kappa } => write!(
                f,
                "uncertainty relation violated (min symplectic eigenvalue {min_kappa:.6} < 1/2)"
            ),
        }
    }
}

/// Outcome of [`validate_state`].
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub valid: bool,
    pub max_asymmetry: f64,
    /// `None` when the matrix is not positive definite.
    pub spectrum: Option<SymplecticSpectrum>,
    pub failure: Option<ValidationFailure>,
}

impl ValidationReport {
    pub fn min_kappa(&self) -> Option<f64> {
        self.spectrum.as_ref().map(SymplecticSpectrum::min)
    }
}

/// Checks symmetry, positive definiteness and the Robertson–Schrödinger
/// condition `min kappa_j >= 1/2 - tol.phys`, in that order.
///
/// Non-finite entries are a [`Error::Malformed`] error rather than an invalid
/// verdict.
pub fn validate_state(s: &GaussianState, tol: &Tolerances) -> Result<ValidationReport> {
    let v = s.cov().matrix();
    if v.iter().chain(s.mean().as_vector().iter()).any(|x| !x.is_finite()) {
        return Err(Error::Malformed("state has non-finite entries".into()));
    }
    let max_asymmetry = max_asymmetry(v);
    let mut report =
        ValidationReport { valid: false, max_asymmetry, spectrum: None, failure: None };
    if max_asymmetry > tol.sym {
        report.failure = Some(ValidationFailure::Asymmetric { max_asymmetry });
        return Ok(report);
    }
    if v.clone().cholesky().is_none() {
        let min_eigenvalue = v.clone().symmetric_eigenvalues().min();
        report.failure = Some(ValidationFailure::NotPositiveDefinite { min_eigenvalue });
        return Ok(report);
    }
    let spectrum = symplectic_eigenvalues(s.cov(), tol)?;
    let min_kappa = spectrum.min();
    report.spectrum = Some(spectrum);
    if min_kappa < 0.5 - tol.phys {
        report.failure = Some(ValidationFailure::UncertaintyViolated { min_kappa });
        return Ok(report);
    }
    report.valid = true;
    Ok(report)
}

/// `Tr rho^2 = 2^-n det(V)^(-1/2)`.
pub fn purity(s: &GaussianState) -> f64 {
    let n = s.n() as i32;
    2f64.powi(-n) / s.cov().determinant().sqrt()
}

/// Result of the matrix purity test `(JV)^2 = -I/4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PurityCheck {
    pub pure: bool,
    /// `max |(JV)^2 + I/4|`.
    pub residual: f64,
}

pub fn is_pure(s: &GaussianState, tol: &Tolerances) -> PurityCheck {
    let n = s.n();
    let j = symplectic_form(n).expect("state has at least one mode");
    let jv = &j * s.cov().matrix();
    let m = &jv * &jv + DMatrix::identity(2 * n, 2 * n) * 0.25;
    let residual = m.amax();
    PurityCheck { pure: residual <= tol.pure, residual }
}
