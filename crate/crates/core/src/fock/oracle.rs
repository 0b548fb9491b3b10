use faer::linalg::matmul::matmul;
use faer::{c64, Accum, Mat, MatRef, Par, Side};
use serde::Serialize;

use super::circuit::{circuit_to_gaussian, CircuitLimits, CircuitOp, GaussianCircuit};
use super::ops::{
    conjugate, displacement_unitary, left_beam_splitter, left_local, rotation_unitary, squeeze_unitary,
    BeamSplitterBlocks, Layout,
};
use crate::error::{Error, Result};
use crate::fidelity::{fidelity, FidelityMethod};
use crate::state::{GaussianState, QuadratureVector};
use crate::tolerance::Tolerances;

const ONE: c64 = c64 { re: 1.0, im: 0.0 };
const ZERO: c64 = c64 { re: 0.0, im: 0.0 };

/// Largest Hilbert-space dimension the propagation will allocate.
const MAX_WORK_DIM: usize = 4096;

/// Options for building Fock-space states from circuits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockOptions {
    pub limits: CircuitLimits,
    /// Skips the parameter limits and the trace-loss budget.
    pub force: bool,
    /// Extra Fock levels per mode kept during propagation; defaults to
    /// `max(4, cutoff/4)`.
    pub padding: Option<usize>,
}

impl Default for FockOptions {
    fn default() -> Self {
        Self { limits: CircuitLimits::default(), force: false, padding: None }
    }
}

impl FockOptions {
    pub fn forced() -> Self {
        Self { force: true, ..Self::default() }
    }
}

/// Truncated density matrix on `cutoff^n` Fock states, renormalized to unit trace.
#[derive(Debug, Clone)]
pub struct FockDensityMatrix {
    n: usize,
    cutoff: usize,
    mat: Mat<c64>,
    trace_loss: f64,
}

impl FockDensityMatrix {
    /// Wraps an explicit matrix; checks shape, Hermiticity and unit trace.
    pub fn new(n: usize, cutoff: usize, mat: Mat<c64>, tol: &Tolerances) -> Result<Self> {
        let dim = cutoff.checked_pow(n as u32).unwrap_or(usize::MAX);
        if mat.nrows() != dim || mat.ncols() != dim {
            return Err(Error::Dimension(format!(
                "{n}-mode density matrix at cutoff {cutoff} must be {dim} x {dim}"
            )));
        }
        let rho = Self { n, cutoff, mat, trace_loss: 0.0 };
        rho.check_hermitian(tol)?;
        let tr = rho.trace();
        if (tr - 1.0).abs() > tol.trunc {
            return Err(Error::InvalidDensity(format!("trace {tr} differs from 1")));
        }
        Ok(rho)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> MatRef<'_, c64> {
        self.mat.as_ref()
    }

    /// Probability lost to truncation before renormalization.
    pub fn trace_loss(&self) -> f64 {
        self.trace_loss
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.mat[(i, i)].re).sum()
    }

    /// Photon-number probabilities on the diagonal.
    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.mat[(i, i)].re).collect()
    }

    /// `Tr ρ²`, the squared Frobenius norm of a Hermitian matrix.
    pub fn purity(&self) -> f64 {
        self.mat.norm_l2().powi(2)
    }

    fn check_hermitian(&self, tol: &Tolerances) -> Result<()> {
        let d = self.dim();
        let mut worst = 0.0f64;
        for j in 0..d {
            for i in j..d {
                worst = worst.max((self.mat[(i, j)] - self.mat[(j, i)].conj()).norm());
            }
        }
        if worst > tol.sym {
            return Err(Error::InvalidDensity(format!("not Hermitian (max deviation {worst:.3e})")));
        }
        Ok(())
    }

    /// Smallest eigenvalue; `< -tol.psd` is an error.
    pub fn check_positive(&self, tol: &Tolerances) -> Result<f64> {
        let ev = self
            .mat
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| Error::NumericalInconsistency(format!("eigenvalues failed: {e:?}")))?;
        let min = ev[0];
        if min < -tol.psd {
            return Err(Error::InvalidDensity(format!("eigenvalue {min:.3e} below -{:.0e}", tol.psd)));
        }
        Ok(min)
    }
}

fn check_support(n: usize, cutoff: usize) -> Result<()> {
    if cutoff < 2 {
        return Err(Error::InvalidParameter(format!("cutoff must be at least 2, got {cutoff}")));
    }
    if n >= 3 && cutoff > 12 {
        return Err(Error::Unsupported(format!("{n}-mode oracle is limited to cutoff <= 12")));
    }
    if n > 3 {
        return Err(Error::Unsupported(format!("oracle supports at most 3 modes, got {n}")));
    }
    Ok(())
}

fn working_dim(cutoff: usize, n: usize, opts: &FockOptions) -> Result<usize> {
    let fit = (1..).take_while(|d: &usize| d.pow(n as u32) <= MAX_WORK_DIM).last().unwrap_or(1);
    if cutoff > fit {
        return Err(Error::Unsupported(format!(
            "cutoff {cutoff} for {n} modes exceeds the {MAX_WORK_DIM}-dimensional working limit"
        )));
    }
    Ok((cutoff + opts.padding.unwrap_or((cutoff / 4).max(4))).min(fit))
}

/// Per-mode mean photon numbers of a Gaussian state.
fn mean_photons(g: &GaussianState) -> Vec<f64> {
    let v = g.cov().matrix();
    let x = g.mean().as_vector();
    (0..g.n())
        .map(|k| {
            let (q, p) = (2 * k, 2 * k + 1);
            0.5 * (v[(q, q)] + v[(p, p)] - 1.0) + 0.5 * (x[q] * x[q] + x[p] * x[p])
        })
        .collect()
}

/// A cutoff at which a thermal tail with the state's largest mean photon
/// number would fit the budget, rounded up to a multiple of 10.
fn suggest_cutoff(g: &GaussianState, cutoff: usize, budget: f64) -> usize {
    let nbar = mean_photons(g).into_iter().fold(0.0, f64::max).max(0.5);
    let t = nbar / (nbar + 1.0);
    let est = (budget.ln() / t.ln()).ceil() as usize;
    est.max(cutoff + 1).div_ceil(10) * 10
}

/// Fock semantics of a circuit, truncated to `cutoff` levels per mode.
///
/// Propagation happens at a padded dimension; the result is projected to
/// `cutoff`, the lost probability recorded as `trace_loss`, and the matrix
/// renormalized. A loss above `tol.trunc` is an error unless forced.
pub fn circuit_to_fock(
    c: &GaussianCircuit,
    cutoff: usize,
    opts: &FockOptions,
    tol: &Tolerances,
) -> Result<FockDensityMatrix> {
    c.validate()?;
    check_support(c.n, cutoff)?;
    if !opts.force {
        c.check_limits(&opts.limits)?;
    }
    let n = c.n;
    let dw = working_dim(cutoff, n, opts)?;
    let lay = Layout { n, d: dw };
    let dim = lay.dim();

    let kappas = c.thermal_kappas();
    let weights: Vec<Vec<f64>> = kappas
        .iter()
        .map(|k| {
            let nbar = k - 0.5;
            (0..dw).map(|i| nbar.powi(i as i32) / (1.0 + nbar).powi(i as i32 + 1)).collect()
        })
        .collect();
    let mut buf = vec![ZERO; dim * dim];
    for r in 0..dim {
        let w: f64 = (0..n).map(|m| weights[m][lay.digit(r, m)]).product();
        buf[r * dim + r] = c64::from(w);
    }

    for op in &c.ops {
        match *op {
            CircuitOp::ThermalInit { .. } => {}
            CircuitOp::Squeeze { mode, r, phase } => {
                let u = squeeze_unitary(dw, r, phase)?;
                conjugate(&mut buf, dim, |b| left_local(b, lay, mode, &u));
            }
            CircuitOp::Rotate { mode, angle } => {
                let u = rotation_unitary(dw, angle);
                conjugate(&mut buf, dim, |b| left_local(b, lay, mode, &u));
            }
            CircuitOp::Displace { mode, q, p } => {
                let u = displacement_unitary(dw, q, p)?;
                conjugate(&mut buf, dim, |b| left_local(b, lay, mode, &u));
            }
            CircuitOp::BeamSplit { mode_a, mode_b, mix_angle, phase } => {
                let bs = BeamSplitterBlocks::new(dw, mix_angle, phase)?;
                conjugate(&mut buf, dim, |b| left_beam_splitter(b, lay, mode_a, mode_b, &bs));
            }
        }
    }

    let keep: Vec<usize> = (0..dim).filter(|&r| (0..n).all(|m| lay.digit(r, m) < cutoff)).collect();
    let k = keep.len();
    let mut mat = Mat::from_fn(k, k, |i, j| buf[keep[j] * dim + keep[i]]);
    drop(buf);
    let trace: f64 = (0..k).map(|i| mat[(i, i)].re).sum();
    let trace_loss = (1.0 - trace).max(0.0);
    if trace_loss > tol.trunc && !opts.force {
        let g = circuit_to_gaussian(c, tol)?;
        return Err(Error::CutoffTooSmall {
            cutoff,
            trace_loss,
            budget: tol.trunc,
            suggested: suggest_cutoff(&g, cutoff, tol.trunc),
        });
    }
    let scale = 1.0 / trace;
    for j in 0..k {
        for i in j..k {
            let h = (mat[(i, j)] + mat[(j, i)].conj()) * (0.5 * scale);
            mat[(i, j)] = h;
            mat[(j, i)] = h.conj();
        }
    }
    Ok(FockDensityMatrix { n, cutoff, mat, trace_loss })
}

/// Low-rank factor `W` with `W W† = ρ`, from the eigendecomposition of `ρ`.
///
/// Eigenvalues at or below the round-off floor `N ε λ_max` are dropped;
/// keeping them would add `sqrt(1e-16)`-sized noise columns.
fn factor(rho: &FockDensityMatrix, tol: &Tolerances) -> Result<Mat<c64>> {
    let dim = rho.dim();
    let eig = rho
        .mat
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::NumericalInconsistency(format!("eigendecomposition failed: {e:?}")))?;
    let lam: Vec<f64> = eig.S().column_vector().iter().map(|x| x.re).collect();
    if lam[0] < -tol.psd {
        return Err(Error::InvalidDensity(format!("eigenvalue {:.3e} below -{:.0e}", lam[0], tol.psd)));
    }
    let floor = dim as f64 * f64::EPSILON * lam[dim - 1];
    let kept: Vec<usize> = (0..dim).filter(|&i| lam[i] > floor).collect();
    let q = eig.U();
    Ok(Mat::from_fn(dim, kept.len(), |i, j| q[(i, kept[j])] * lam[kept[j]].sqrt()))
}

/// Uhlmann fidelity `(Tr sqrt(sqrt(ρ₂) ρ₁ sqrt(ρ₂)))²` by dense linear algebra.
///
/// With `ρ_k = W_k W_k†`, the trace equals the sum of the singular values of
/// `W₂† W₁`. Working with singular values rather than eigenvalues of
/// `sqrt(ρ₂) ρ₁ sqrt(ρ₂)` keeps the absolute error at `ε` instead of `sqrt(ε)`.
pub fn fock_fidelity(r1: &FockDensityMatrix, r2: &FockDensityMatrix, tol: &Tolerances) -> Result<f64> {
    if r1.n != r2.n || r1.cutoff != r2.cutoff {
        return Err(Error::Dimension(format!(
            "density matrices differ in shape ({} modes at cutoff {} vs {} at {})",
            r1.n, r1.cutoff, r2.n, r2.cutoff
        )));
    }
    r1.check_hermitian(tol)?;
    r2.check_hermitian(tol)?;
    let w1 = factor(r1, tol)?;
    let w2 = factor(r2, tol)?;
    let mut c = Mat::zeros(w2.ncols(), w1.ncols());
    matmul(c.as_mut(), Accum::Replace, w2.adjoint(), w1.as_ref(), ONE, Par::Seq);
    let sv = c
        .singular_values()
        .map_err(|e| Error::NumericalInconsistency(format!("singular values failed: {e:?}")))?;
    let s: f64 = sv.iter().sum();
    Ok(s * s)
}

/// `Tr[(A_0 ⊗ A_1 ⊗ ...) ρ]`, contracting one mode at a time.
fn trace_with_product(rho: MatRef<'_, c64>, ops: &[Mat<c64>], d: usize) -> c64 {
    let mut cur = rho.to_owned();
    for a in ops {
        let s = cur.nrows() / d;
        let mut next = Mat::<c64>::zeros(s, s);
        for i0 in 0..d {
            for j0 in 0..d {
                let w = a[(i0, j0)];
                if w == ZERO {
                    continue;
                }
                for ic in 0..s {
                    for jr in 0..s {
                        next[(jr, ic)] += w * cur[(j0 * s + jr, i0 * s + ic)];
                    }
                }
            }
        }
        cur = next;
    }
    cur[(0, 0)]
}

/// `χ(u) = exp(-uᵀVu/2 - i <u>ᵀu)` for a Gaussian state.
pub fn gaussian_characteristic(g: &GaussianState, u: &QuadratureVector) -> Result<c64> {
    if u.n() != g.n() {
        return Err(Error::Dimension(format!("sample has {} modes, state {}", u.n(), g.n())));
    }
    let uv = u.as_vector();
    let quad = uv.dot(&(g.cov().matrix() * uv));
    let phase = g.mean().as_vector().dot(uv);
    Ok(c64::from_polar((-0.5 * quad).exp(), -phase))
}

/// `χ(u) = Tr[D(Ju) ρ]` on a truncated density matrix, where `D(x)` shifts
/// the quadrature mean by `x`.
pub fn fock_characteristic(rho: &FockDensityMatrix, u: &QuadratureVector) -> Result<c64> {
    if u.n() != rho.n {
        return Err(Error::Dimension(format!("sample has {} modes, state {}", u.n(), rho.n)));
    }
    let uv = u.as_vector();
    let ops = (0..rho.n)
        .map(|k| displacement_unitary(rho.cutoff, uv[2 * k + 1], -uv[2 * k]))
        .collect::<Result<Vec<_>>>()?;
    Ok(trace_with_product(rho.matrix(), &ops, rho.cutoff))
}

/// Largest `|χ_gauss(u) - χ_fock(u)|` over `samples`.
pub fn cf_check(
    c: &GaussianCircuit,
    cutoff: usize,
    samples: &[QuadratureVector],
    opts: &FockOptions,
    tol: &Tolerances,
) -> Result<f64> {
    let g = circuit_to_gaussian(c, tol)?;
    let rho = circuit_to_fock(c, cutoff, opts, tol)?;
    let mut worst = 0.0f64;
    for u in samples {
        let d = gaussian_characteristic(&g, u)? - fock_characteristic(&rho, u)?;
        worst = worst.max(d.norm());
    }
    Ok(worst)
}

/// Closed form against brute force for one circuit pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct OracleComparison {
    pub closed_form: f64,
    pub oracle: f64,
    pub deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub method: FidelityMethod,
    pub cutoff: usize,
    pub trace_loss: [f64; 2],
}

pub fn oracle_compare(
    c1: &GaussianCircuit,
    c2: &GaussianCircuit,
    cutoff: usize,
    opts: &FockOptions,
    tol: &Tolerances,
) -> Result<OracleComparison> {
    if c1.n != c2.n {
        return Err(Error::Dimension(format!("circuits have {} and {} modes", c1.n, c2.n)));
    }
    let g1 = circuit_to_gaussian(c1, tol)?;
    let g2 = circuit_to_gaussian(c2, tol)?;
    let closed = fidelity(&g1, &g2, tol)?;
    let r1 = circuit_to_fock(c1, cutoff, opts, tol)?;
    let r2 = circuit_to_fock(c2, cutoff, opts, tol)?;
    let oracle = fock_fidelity(&r1, &r2, tol)?;
    let deviation = (closed.fidelity - oracle).abs();
    let tolerance = tol.oracle(c1.n);
    Ok(OracleComparison {
        closed_form: closed.fidelity,
        oracle,
        deviation,
        tolerance,
        passed: deviation < tolerance,
        method: closed.method,
        cutoff,
        trace_loss: [r1.trace_loss, r2.trace_loss],
    })
}
