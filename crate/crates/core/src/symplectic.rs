//! Symplectic form, symplectic matrices and Williamson spectra.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::state::{CovarianceMatrix, GaussianState, QuadratureVector, SymplecticSpectrum};
use crate::tolerance::Tolerances;

/// `J = ⊕_k [[0, 1], [-1, 0]]` for `n` modes.
pub fn symplectic_form(n: usize) -> Result<DMatrix<f64>> {
    if n == 0 {
        return Err(Error::InvalidModeCount(0));
    }
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        j[(2 * k, 2 * k + 1)] = 1.0;
        j[(2 * k + 1, 2 * k)] = -1.0;
    }
    Ok(j)
}

/// A real `2n x 2n` matrix with `S J S^T = J`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMatrix {
    n: usize,
    mat: DMatrix<f64>,
}

impl SymplecticMatrix {
    /// Checks `max |S J S^T - J| <= tol.symp * max(1, max|S|^2)`.
    pub fn new(mat: DMatrix<f64>, tol: &Tolerances) -> Result<Self> {
        let (r, c) = mat.shape();
        if r != c || r == 0 || r % 2 != 0 {
            return Err(Error::Dimension(format!("symplectic matrix must be 2n x 2n, got {r} x {c}")));
        }
        if mat.iter().any(|x| !x.is_finite()) {
            return Err(Error::Malformed("symplectic matrix has non-finite entries".into()));
        }
        let n = r / 2;
        let j = symplectic_form(n)?;
        let residual = (&mat * &j * mat.transpose() - &j).amax();
        let scale = mat.amax().powi(2).max(1.0);
        if residual > tol.symp * scale {
            return Err(Error::NotSymplectic(residual));
        }
        Ok(Self { n, mat })
    }

    pub fn identity(n: usize) -> Self {
        Self { n, mat: DMatrix::identity(2 * n, 2 * n) }
    }

    /// Single-mode squeezer on `mode`:
    /// `cosh r I - sinh r [[cos φ, sin φ], [sin φ, -cos φ]]`.
    /// With `phase = 0` the q-variance of the vacuum becomes `e^{-2r}/2`.
    pub fn squeeze(n: usize, mode: usize, r: f64, phase: f64) -> Result<Self> {
        check_mode(n, mode)?;
        let (ch, sh) = (r.cosh(), r.sinh());
        let (cp, sp) = (phase.cos(), phase.sin());
        let block = [[ch - sh * cp, -sh * sp], [-sh * sp, ch + sh * cp]];
        Ok(Self::embed_local(n, mode, block))
    }

    /// Phase rotation `[[cos θ, -sin θ], [sin θ, cos θ]]` on `mode`.
    pub fn rotation(n: usize, mode: usize, angle: f64) -> Result<Self> {
        check_mode(n, mode)?;
        let (c, s) = (angle.cos(), angle.sin());
        Ok(Self::embed_local(n, mode, [[c, -s], [s, c]]))
    }

    /// Beam splitter with mixing angle `theta` between modes `a` and `b`.
    ///
    /// Matches the Fock-space unitary `exp(θ (e^{iφ} a b† - e^{-iφ} a† b))`.
    pub fn beam_splitter(n: usize, a: usize, b: usize, theta: f64, phase: f64) -> Result<Self> {
        check_mode(n, a)?;
        check_mode(n, b)?;
        if a == b {
            return Err(Error::InvalidParameter("beam splitter needs two distinct modes".into()));
        }
        let (c, s) = (theta.cos(), theta.sin());
        let (cp, sp) = (phase.cos(), phase.sin());
        let mut m = DMatrix::identity(2 * n, 2 * n);
        let (qa, pa, qb, pb) = (2 * a, 2 * a + 1, 2 * b, 2 * b + 1);
        m[(qa, qa)] = c;
        m[(pa, pa)] = c;
        m[(qb, qb)] = c;
        m[(pb, pb)] = c;
        m[(qa, qb)] = -s * cp;
        m[(qa, pb)] = -s * sp;
        m[(pa, qb)] = s * sp;
        m[(pa, pb)] = -s * cp;
        m[(qb, qa)] = s * cp;
        m[(qb, pa)] = -s * sp;
        m[(pb, qa)] = s * sp;
        m[(pb, pa)] = s * cp;
        Ok(Self { n, mat: m })
    }

    fn embed_local(n: usize, mode: usize, block: [[f64; 2]; 2]) -> Self {
        let mut m = DMatrix::identity(2 * n, 2 * n);
        for (i, row) in block.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                m[(2 * mode + i, 2 * mode + j)] = *v;
            }
        }
        Self { n, mat: m }
    }

    /// `next ∘ self`: apply `self` first, then `next`.
    pub fn then(&self, next: &SymplecticMatrix) -> Result<Self> {
        if self.n != next.n {
            return Err(Error::Dimension(format!(
                "cannot compose {}-mode and {}-mode symplectic matrices",
                self.n, next.n
            )));
        }
        Ok(Self { n: self.n, mat: &next.mat * &self.mat })
    }

    /// `S^{-1} = -J S^T J`.
    pub fn inverse(&self) -> Self {
        let j = symplectic_form(self.n).expect("n >= 1");
        Self { n: self.n, mat: -(&j * self.mat.transpose() * &j) }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }
}

fn check_mode(n: usize, mode: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidModeCount(0));
    }
    if mode >= n {
        return Err(Error::InvalidParameter(format!("mode {mode} out of range for {n} modes")));
    }
    Ok(())
}

/// `V -> S V S^T`, `mean -> S mean + shift`.
pub fn apply_symplectic(
    s: &GaussianState,
    sm: &SymplecticMatrix,
    shift: &QuadratureVector,
) -> Result<GaussianState> {
    if sm.n() != s.n() || shift.n() != s.n() {
        return Err(Error::Dimension(format!(
            "state has {} modes, symplectic matrix {}, shift {}",
            s.n(),
            sm.n(),
            shift.n()
        )));
    }
    let m = sm.matrix();
    let cov = CovarianceMatrix::symmetrized(m * s.cov().matrix() * m.transpose());
    let mean: DVector<f64> = m * s.mean().as_vector() + shift.as_vector();
    GaussianState::new(QuadratureVector::from_vector(mean), cov)
}

/// Symplectic eigenvalues from the spectrum `±iκ_j` of `JV`.
///
/// Eigenvalues are sorted by imaginary part and the `j`-th largest is paired
/// with the `j`-th smallest; each `κ_j` is the mean of the paired magnitudes.
pub fn symplectic_eigenvalues(v: &CovarianceMatrix, tol: &Tolerances) -> Result<SymplecticSpectrum> {
    let n = v.n();
    if v.matrix().clone().cholesky().is_none() {
        return Err(Error::Domain("covariance matrix is not positive definite".into()));
    }
    let j = symplectic_form(n)?;
    let jv = &j * v.matrix();
    let eig = jv
        .clone()
        .try_schur(f64::EPSILON, 0)
        .ok_or_else(|| Error::NumericalInconsistency("Schur decomposition of JV did not converge".into()))?
        .complex_eigenvalues();
    let mut ev: Vec<_> = eig.iter().copied().collect();
    let scale = ev.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let max_re = ev.iter().map(|z| z.re.abs()).fold(0.0, f64::max);
    if max_re > tol.det * scale.max(1.0) {
        return Err(Error::NumericalInconsistency(format!(
            "eigenvalues of JV have real parts up to {max_re:.3e}"
        )));
    }
    ev.sort_by(|a, b| b.im.total_cmp(&a.im));
    let kappas = (0..n).map(|k| 0.5 * (ev[k].im - ev[2 * n - 1 - k].im)).collect();
    SymplecticSpectrum::new(kappas)
}

/// `κ̃_j = κ_j + sqrt(κ_j^2 - 1/4)`, the spectrum of the square-root state.
pub fn sqrt_spectrum(kappa: &SymplecticSpectrum, tol: &Tolerances) -> Result<SymplecticSpectrum> {
    let mut out = Vec::with_capacity(kappa.len());
    for &k in kappa.values() {
        if k < 0.5 - tol.phys {
            return Err(Error::Domain(format!("symplectic eigenvalue {k} below 1/2")));
        }
        out.push(k + (k * k - 0.25).max(0.0).sqrt());
    }
    SymplecticSpectrum::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::StandardFormParams;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn form_blocks_and_square() {
        assert_eq!(symplectic_form(1).unwrap(), DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]));
        for n in 1..5 {
            let j = symplectic_form(n).unwrap();
            assert_eq!(&j * &j, -DMatrix::identity(2 * n, 2 * n));
            assert_eq!(j.transpose(), -&j);
        }
        assert_eq!(symplectic_form(0), Err(Error::InvalidModeCount(0)));
    }

    #[test]
    fn spectra_of_simple_states() {
        let k = symplectic_eigenvalues(&CovarianceMatrix::vacuum(2), &tol()).unwrap();
        assert_eq!(k.values(), &[0.5, 0.5]);
        let th = CovarianceMatrix::thermal(&[1.0, 1.5]).unwrap();
        let k = symplectic_eigenvalues(&th, &tol()).unwrap();
        assert!((k.values()[0] - 1.5).abs() < 1e-14 && (k.values()[1] - 1.0).abs() < 1e-14);
        let p = StandardFormParams::new(1.0, 1.0, 0.5, -0.5).unwrap();
        let k = symplectic_eigenvalues(&CovarianceMatrix::new(p.matrix()).unwrap(), &tol()).unwrap();
        for v in k.values() {
            assert!((v - 0.75f64.sqrt()).abs() < 1e-13);
        }
    }

    #[test]
    fn non_positive_definite_is_a_domain_error() {
        let m = CovarianceMatrix::new(DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0])).unwrap();
        assert!(matches!(symplectic_eigenvalues(&m, &tol()), Err(Error::Domain(_))));
    }

    #[test]
    fn sqrt_spectrum_values_and_inverse() {
        let s = SymplecticSpectrum::new(vec![0.5, 1.5]).unwrap();
        let t = sqrt_spectrum(&s, &tol()).unwrap();
        assert!((t.values()[0] - (1.5 + 2f64.sqrt())).abs() < 1e-15);
        assert_eq!(t.values()[1], 0.5);
        for (kt, k) in t.values().iter().zip(s.values()) {
            assert!((0.5 * (kt + 1.0 / (4.0 * kt)) - k).abs() < 1e-15);
        }
        let bad = SymplecticSpectrum::new(vec![0.4]).unwrap();
        assert!(matches!(sqrt_spectrum(&bad, &tol()), Err(Error::Domain(_))));
    }

    #[test]
    fn squeezing_vacuum() {
        let s = SymplecticMatrix::squeeze(1, 0, 0.5, 0.0).unwrap();
        let out = apply_symplectic(&GaussianState::vacuum(1), &s, &QuadratureVector::zeros(1)).unwrap();
        let v = out.cov().matrix();
        assert!((v[(0, 0)] - (-1f64).exp() / 2.0).abs() < 1e-15);
        assert!((v[(1, 1)] - 1f64.exp() / 2.0).abs() < 1e-14);
        let k = symplectic_eigenvalues(out.cov(), &tol()).unwrap();
        assert!((k.values()[0] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn identity_action_and_shift() {
        let th = GaussianState::thermal(&[1.5, 0.7]).unwrap();
        let shift = QuadratureVector::new(vec![0.1, -0.2, 0.3, 0.4]).unwrap();
        let out = apply_symplectic(&th, &SymplecticMatrix::identity(2), &QuadratureVector::zeros(2)).unwrap();
        assert_eq!(out, th);
        let out = apply_symplectic(&th, &SymplecticMatrix::identity(2), &shift).unwrap();
        assert_eq!(out.mean(), &shift);
    }

    #[test]
    fn constructors_are_symplectic_and_inverse_works() {
        let t = tol();
        let s = SymplecticMatrix::squeeze(2, 1, 0.7, 0.3)
            .unwrap()
            .then(&SymplecticMatrix::rotation(2, 0, 1.1).unwrap())
            .unwrap()
            .then(&SymplecticMatrix::beam_splitter(2, 0, 1, 0.4, 0.9).unwrap())
            .unwrap();
        SymplecticMatrix::new(s.matrix().clone(), &t).unwrap();
        let prod = s.matrix() * s.inverse().matrix();
        assert!((prod - DMatrix::identity(4, 4)).amax() < 1e-13);
        let bad = DMatrix::identity(2, 2) * 2.0;
        assert!(matches!(SymplecticMatrix::new(bad, &t), Err(Error::NotSymplectic(_))));
    }

    #[test]
    fn tmsv_from_squeezers_and_beam_splitter() {
        let r = 0.6;
        let s = SymplecticMatrix::squeeze(2, 0, r, std::f64::consts::PI)
            .unwrap()
            .then(&SymplecticMatrix::squeeze(2, 1, r, 0.0).unwrap())
            .unwrap()
            .then(&SymplecticMatrix::beam_splitter(2, 0, 1, std::f64::consts::FRAC_PI_4, 0.0).unwrap())
            .unwrap();
        let out = apply_symplectic(&GaussianState::vacuum(2), &s, &QuadratureVector::zeros(2)).unwrap();
        let b = (2.0 * r).cosh() / 2.0;
        let c = (2.0 * r).sinh() / 2.0;
        let expect = StandardFormParams { b1: b, b2: b, c, d: -c }.matrix();
        assert!((out.cov().matrix() - &expect).amax() < 1e-14, "{} vs {}", out.cov().matrix(), expect);
        assert!(crate::state::is_pure(&out, &tol()).pure);
    }
}
