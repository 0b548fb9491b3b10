#![allow(dead_code)]

use std::f64::consts::PI;

use gaussfid::fock::{CircuitOp, GaussianCircuit};
use gaussfid::state::{GaussianState, QuadratureVector, StandardFormParams};
use gaussfid::symplectic::{apply_symplectic, SymplecticMatrix};
use gaussfid::Tolerances;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Rotations and squeezers on every mode, beam splitters on every pair,
/// then another layer of rotations.
pub fn random_symplectic(rng: &mut impl Rng, n: usize, max_r: f64) -> SymplecticMatrix {
    let mut s = SymplecticMatrix::identity(n);
    let push = |s: &mut SymplecticMatrix, t: SymplecticMatrix| *s = s.then(&t).unwrap();
    for m in 0..n {
        push(&mut s, SymplecticMatrix::rotation(n, m, rng.random_range(0.0..2.0 * PI)).unwrap());
        let (r, phi) = (rng.random_range(0.0..max_r), rng.random_range(0.0..2.0 * PI));
        push(&mut s, SymplecticMatrix::squeeze(n, m, r, phi).unwrap());
    }
    for a in 0..n {
        for b in a + 1..n {
            let (t, phi) = (rng.random_range(0.0..PI), rng.random_range(0.0..2.0 * PI));
            push(&mut s, SymplecticMatrix::beam_splitter(n, a, b, t, phi).unwrap());
        }
    }
    for m in 0..n {
        push(&mut s, SymplecticMatrix::rotation(n, m, rng.random_range(0.0..2.0 * PI)).unwrap());
    }
    s
}

pub fn random_mean(rng: &mut impl Rng, n: usize, scale: f64) -> QuadratureVector {
    QuadratureVector::new((0..2 * n).map(|_| rng.random_range(-scale..scale)).collect()).unwrap()
}

/// `S diag(κ) Sᵀ` with a random mean; `κ = 1/2` on every mode when `pure`.
pub fn random_state(rng: &mut impl Rng, n: usize, pure: bool) -> GaussianState {
    let kappas: Vec<f64> =
        (0..n).map(|_| if pure { 0.5 } else { 0.5 + rng.random_range(0.0..2.0) }).collect();
    let s = random_symplectic(rng, n, 0.8);
    let mean = random_mean(rng, n, 1.0);
    apply_symplectic(&GaussianState::thermal(&kappas).unwrap(), &s, &mean).unwrap()
}

/// Mixed with probability 0.8, pure otherwise.
pub fn random_valid_state(rng: &mut impl Rng, n: usize) -> GaussianState {
    let pure = rng.random_bool(0.2);
    random_state(rng, n, pure)
}

/// Displaced product of thermal modes.
pub fn random_diagonal_state(rng: &mut impl Rng, n: usize) -> (GaussianState, Vec<f64>) {
    let kappas: Vec<f64> = (0..n).map(|_| 0.5 + rng.random_range(0.0..2.0)).collect();
    let mean = random_mean(rng, n, 1.0).to_vec();
    (GaussianState::thermal(&kappas).unwrap().displaced_to(mean).unwrap(), kappas)
}

/// Block-diagonal product of one-mode states.
pub fn product(a: &GaussianState, b: &GaussianState) -> GaussianState {
    let (na, nb) = (2 * a.n(), 2 * b.n());
    let mut cov = nalgebra::DMatrix::zeros(na + nb, na + nb);
    cov.view_mut((0, 0), (na, na)).copy_from(a.cov().matrix());
    cov.view_mut((na, na), (nb, nb)).copy_from(b.cov().matrix());
    let mut mean = a.mean().to_vec();
    mean.extend(b.mean().to_vec());
    GaussianState::from_parts(mean, cov).unwrap()
}

/// A physical standard form, drawn by rejection.
pub fn random_standard_form(rng: &mut impl Rng) -> StandardFormParams {
    let tol = Tolerances::default();
    loop {
        let b1: f64 = rng.random_range(0.5..3.0);
        let b2 = rng.random_range(0.5..3.0);
        let cmax = (b1 * b2).sqrt();
        let c = rng.random_range(0.0..cmax);
        let d = rng.random_range(-c..=c);
        let Ok(p) = StandardFormParams::new(b1, b2, c, d) else { continue };
        let (_, report) = gaussfid::state::standard_form_cm(&p, &tol).unwrap();
        if report.valid {
            return p;
        }
    }
}

/// One-mode circuit: thermal init, squeeze, rotation, displacement.
pub fn random_one_mode_circuit(rng: &mut impl Rng, max_nbar: f64, max_r: f64, max_disp: f64) -> GaussianCircuit {
    let ops = vec![
        CircuitOp::ThermalInit { mode: 0, mean_photons: rng.random_range(0.0..=max_nbar) },
        CircuitOp::Squeeze { mode: 0, r: rng.random_range(0.0..=max_r), phase: rng.random_range(0.0..2.0 * PI) },
        CircuitOp::Rotate { mode: 0, angle: rng.random_range(0.0..2.0 * PI) },
        CircuitOp::Displace {
            mode: 0,
            q: rng.random_range(-max_disp..=max_disp),
            p: rng.random_range(-max_disp..=max_disp),
        },
    ];
    GaussianCircuit::new(1, ops).unwrap()
}

/// Two-mode circuit: thermal init and a squeeze on each mode, one beam
/// splitter, then a displacement on each mode.
pub fn random_two_mode_circuit(rng: &mut impl Rng, max_nbar: f64, max_r: f64, max_disp: f64) -> GaussianCircuit {
    let mut ops = vec![];
    for mode in 0..2 {
        ops.push(CircuitOp::ThermalInit { mode, mean_photons: rng.random_range(0.0..=max_nbar) });
    }
    for mode in 0..2 {
        ops.push(CircuitOp::Squeeze {
            mode,
            r: rng.random_range(0.0..=max_r),
            phase: rng.random_range(0.0..2.0 * PI),
        });
    }
    ops.push(CircuitOp::BeamSplit {
        mode_a: 0,
        mode_b: 1,
        mix_angle: rng.random_range(0.0..PI),
        phase: rng.random_range(0.0..2.0 * PI),
    });
    for mode in 0..2 {
        ops.push(CircuitOp::Displace {
            mode,
            q: rng.random_range(-max_disp..=max_disp),
            p: rng.random_range(-max_disp..=max_disp),
        });
    }
    GaussianCircuit::new(2, ops).unwrap()
}

pub fn rel(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Prints one verdict line and returns whether it passed.
pub fn verdict(name: &str, passed: bool, detail: &str) -> bool {
    println!("{} {name}: {detail}", if passed { "PASS" } else { "FAIL" });
    passed
}
