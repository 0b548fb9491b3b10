//! Truncated Fock-space operators and their action on density matrices.
//!
//! Density matrices are stored as flat column-major buffers. A basis index
//! is `Σ_k i_k d^(n-1-k)`, so mode 0 is the most significant digit.
//!
//! Single-mode unitaries are exponentiated in a much larger space and then
//! cut down to the working dimension, so that each stored block is the exact
//! projection `P U P` of the true operator rather than the exponential of a
//! truncated generator.

use faer::linalg::matmul::matmul;
use faer::{c64, Accum, Mat, MatMut, MatRef, Par, Side};

use crate::error::{Error, Result};

const ONE: c64 = c64 { re: 1.0, im: 0.0 };
const ZERO: c64 = c64 { re: 0.0, im: 0.0 };

/// Dimension of the auxiliary space used to exponentiate single-mode generators.
pub(crate) fn big_dim(d: usize) -> usize {
    6 * d + 40
}

/// `exp(G)` for anti-Hermitian `G`, via the eigendecomposition of `iG`.
pub(crate) fn expm_anti_hermitian(g: MatRef<'_, c64>) -> Result<Mat<c64>> {
    let n = g.nrows();
    let h = Mat::from_fn(n, n, |i, j| {
        let x = c64::new(0.0, 1.0) * g[(i, j)];
        let y = (c64::new(0.0, 1.0) * g[(j, i)]).conj();
        (x + y) * 0.5
    });
    let eig = h
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::NumericalInconsistency(format!("eigendecomposition failed: {e:?}")))?;
    let q = eig.U();
    let s = eig.S().column_vector();
    let qe = Mat::from_fn(n, n, |i, j| q[(i, j)] * c64::from_polar(1.0, -s[j].re));
    let mut out = Mat::zeros(n, n);
    matmul(out.as_mut(), Accum::Replace, qe.as_ref(), q.adjoint(), ONE, Par::Seq);
    Ok(out)
}

fn leading_block(u: &Mat<c64>, d: usize) -> Mat<c64> {
    Mat::from_fn(d, d, |i, j| u[(i, j)])
}

/// `P exp(r (e^{-iφ} a² - e^{iφ} a†²)/2) P` on the first `d` Fock states.
pub fn squeeze_unitary(d: usize, r: f64, phase: f64) -> Result<Mat<c64>> {
    let m = big_dim(d);
    let mut g = Mat::<c64>::zeros(m, m);
    for k in 2..m {
        let amp = 0.5 * r * ((k * (k - 1)) as f64).sqrt();
        g[(k - 2, k)] = c64::from_polar(amp, -phase);
        g[(k, k - 2)] = -c64::from_polar(amp, phase);
    }
    Ok(leading_block(&expm_anti_hermitian(g.as_ref())?, d))
}

/// `P exp(α a† - α* a) P` with `α = (q + i p)/√2`.
pub fn displacement_unitary(d: usize, q: f64, p: f64) -> Result<Mat<c64>> {
    let m = big_dim(d);
    let alpha = c64::new(q, p) / 2f64.sqrt();
    let mut g = Mat::<c64>::zeros(m, m);
    for k in 1..m {
        let s = (k as f64).sqrt();
        g[(k, k - 1)] = alpha * s;
        g[(k - 1, k)] = -alpha.conj() * s;
    }
    Ok(leading_block(&expm_anti_hermitian(g.as_ref())?, d))
}

/// `exp(iθ n̂)` on the first `d` Fock states.
pub fn rotation_unitary(d: usize, angle: f64) -> Mat<c64> {
    Mat::from_fn(d, d, |i, j| if i == j { c64::from_polar(1.0, angle * i as f64) } else { ZERO })
}

/// The beam splitter `exp(θ (e^{iφ} a b† - e^{-iφ} a† b))` restricted to
/// `d x d`, stored per total-photon-number sector.
pub struct BeamSplitterBlocks {
    #[cfg_attr(not(test), allow(dead_code))]
    d: usize,
    /// For sector `N`: smallest allowed `k_a`, and the block over `k_a`.
    sectors: Vec<(usize, Mat<c64>)>,
}

impl BeamSplitterBlocks {
    pub fn new(d: usize, theta: f64, phase: f64) -> Result<Self> {
        let mut sectors = Vec::with_capacity(2 * d - 1);
        for total in 0..=2 * (d - 1) {
            let dim = total + 1;
            let mut g = Mat::<c64>::zeros(dim, dim);
            for k in 1..=total {
                let amp = theta * ((k * (total - k + 1)) as f64).sqrt();
                g[(k - 1, k)] = c64::from_polar(amp, phase);
                g[(k, k - 1)] = -c64::from_polar(amp, -phase);
            }
            let u = expm_anti_hermitian(g.as_ref())?;
            let lo = total.saturating_sub(d - 1);
            let hi = total.min(d - 1);
            let block = Mat::from_fn(hi - lo + 1, hi - lo + 1, |i, j| u[(lo + i, lo + j)]);
            sectors.push((lo, block));
        }
        Ok(Self { d, sectors })
    }

    /// Dense `d² x d²` matrix in the `(k_a, k_b)` basis, mode a most significant.
    #[cfg(test)]
    pub fn dense(&self) -> Mat<c64> {
        let d = self.d;
        let mut out = Mat::zeros(d * d, d * d);
        for (total, (lo, b)) in self.sectors.iter().enumerate() {
            for i in 0..b.nrows() {
                for j in 0..b.ncols() {
                    let (ka, kb) = (lo + i, total - lo - i);
                    let (la, lb) = (lo + j, total - lo - j);
                    out[(ka * d + kb, la * d + lb)] = b[(i, j)];
                }
            }
        }
        out
    }
}

/// Shape of a flat `n`-mode density matrix with per-mode dimension `d`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Layout {
    pub n: usize,
    pub d: usize,
}

impl Layout {
    pub fn dim(&self) -> usize {
        self.d.pow(self.n as u32)
    }

    pub fn stride(&self, mode: usize) -> usize {
        self.d.pow((self.n - 1 - mode) as u32)
    }

    pub fn digit(&self, index: usize, mode: usize) -> usize {
        (index / self.stride(mode)) % self.d
    }
}

/// `ρ -> (I ⊗ U ⊗ I) ρ` on `mode`.
pub(crate) fn left_local(buf: &mut [c64], lay: Layout, mode: usize, u: &Mat<c64>) {
    let d = lay.d;
    let s = lay.stride(mode);
    if s == 1 {
        let cols = buf.len() / d;
        let block = 4096.min(cols);
        let mut tmp = vec![ZERO; d * block];
        let mut start = 0;
        while start < cols {
            let w = block.min(cols - start);
            let x = &mut buf[start * d..(start + w) * d];
            {
                let xr = MatRef::from_column_major_slice(&*x, d, w);
                let t = MatMut::from_column_major_slice_mut(&mut tmp[..d * w], d, w);
                matmul(t, Accum::Replace, u.as_ref(), xr, ONE, Par::Seq);
            }
            x.copy_from_slice(&tmp[..d * w]);
            start += w;
        }
    } else {
        let ut = u.transpose().to_owned();
        let len = s * d;
        let mut tmp = vec![ZERO; len];
        for chunk in buf.chunks_exact_mut(len) {
            {
                let xr = MatRef::from_column_major_slice(&*chunk, s, d);
                let t = MatMut::from_column_major_slice_mut(&mut tmp[..], s, d);
                matmul(t, Accum::Replace, xr, ut.as_ref(), ONE, Par::Seq);
            }
            chunk.copy_from_slice(&tmp);
        }
    }
}

/// `ρ -> B ρ` for a beam splitter between modes `a` and `b`.
pub(crate) fn left_beam_splitter(buf: &mut [c64], lay: Layout, a: usize, b: usize, bs: &BeamSplitterBlocks) {
    let dim = lay.dim();
    let (sa, sb) = (lay.stride(a), lay.stride(b));
    let bases: Vec<usize> =
        (0..dim).filter(|&r| lay.digit(r, a) == 0 && lay.digit(r, b) == 0).collect();
    let mut v = vec![ZERO; lay.d];
    let mut w = vec![ZERO; lay.d];
    for col in buf.chunks_exact_mut(dim) {
        for &base in &bases {
            for (total, (lo, block)) in bs.sectors.iter().enumerate() {
                let m = block.nrows();
                let idx = |i: usize| base + (lo + i) * sa + (total - lo - i) * sb;
                for (i, vi) in v.iter_mut().take(m).enumerate() {
                    *vi = col[idx(i)];
                }
                for (i, wi) in w.iter_mut().take(m).enumerate() {
                    let mut acc = ZERO;
                    for (j, vj) in v.iter().take(m).enumerate() {
                        acc += block[(i, j)] * vj;
                    }
                    *wi = acc;
                }
                for (i, wi) in w.iter().take(m).enumerate() {
                    col[idx(i)] = *wi;
                }
            }
        }
    }
}

/// In-place conjugate transpose of a square column-major buffer.
pub(crate) fn adjoint_in_place(buf: &mut [c64], dim: usize) {
    for j in 0..dim {
        buf[j * dim + j] = buf[j * dim + j].conj();
        for i in (j + 1)..dim {
            let (x, y) = (buf[j * dim + i], buf[i * dim + j]);
            buf[j * dim + i] = y.conj();
            buf[i * dim + j] = x.conj();
        }
    }
}

/// `ρ -> U ρ U†` for a Hermitian `ρ`, given the action of `U` from the left.
///
/// Uses `U (U ρ)† = U ρ U†`, which holds because `ρ` is Hermitian.
pub(crate) fn conjugate(buf: &mut [c64], dim: usize, mut left: impl FnMut(&mut [c64])) {
    left(buf);
    adjoint_in_place(buf, dim);
    left(buf);
}
