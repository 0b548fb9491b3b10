mod common;

use common::*;
use gaussfid::fidelity::{fidelity, FidelityMethod};
use gaussfid::fock::{
    circuit_to_fock, circuit_to_gaussian, fock_fidelity, oracle_compare, CircuitOp, FockOptions, GaussianCircuit,
};
use gaussfid::state::purity;
use gaussfid::{Error, Tolerances};

fn tol() -> Tolerances {
    Tolerances::default()
}

#[test]
fn one_mode_agreement_inside_the_trace_budget() {
    let mut rng = rng(11);
    for _ in 0..20 {
        let a = random_one_mode_circuit(&mut rng, 0.5, 0.3, 0.7);
        let b = random_one_mode_circuit(&mut rng, 0.5, 0.3, 0.7);
        let c = oracle_compare(&a, &b, 40, &FockOptions::default(), &tol()).unwrap();
        assert!(c.passed && c.deviation < 1e-9, "{c:?}");
        assert!(c.trace_loss.iter().all(|&l| l < tol().trunc));
    }
}

#[test]
fn two_mode_agreement_inside_the_trace_budget() {
    let mut rng = rng(12);
    for _ in 0..3 {
        let a = random_two_mode_circuit(&mut rng, 0.2, 0.2, 0.4);
        let b = random_two_mode_circuit(&mut rng, 0.2, 0.2, 0.4);
        let c = oracle_compare(&a, &b, 20, &FockOptions::default(), &tol()).unwrap();
        assert_eq!(c.method, FidelityMethod::TwoMode);
        assert!(c.deviation < 1e-6, "{c:?}");
    }
}

#[test]
fn deviation_shrinks_with_the_cutoff() {
    let mut rng = rng(13);
    let a = random_one_mode_circuit(&mut rng, 2.0, 0.8, 2.0);
    let b = random_one_mode_circuit(&mut rng, 2.0, 0.8, 2.0);
    let t = tol();
    let exact = fidelity(&circuit_to_gaussian(&a, &t).unwrap(), &circuit_to_gaussian(&b, &t).unwrap(), &t)
        .unwrap()
        .fidelity;
    let mut last = f64::INFINITY;
    for d in [20, 30, 40, 60, 80] {
        let opts = FockOptions::forced();
        let r1 = circuit_to_fock(&a, d, &opts, &t).unwrap();
        let r2 = circuit_to_fock(&b, d, &opts, &t).unwrap();
        let dev = (fock_fidelity(&r1, &r2, &t).unwrap() - exact).abs();
        assert!(dev < last, "D={d}: {dev} after {last}");
        last = dev;
    }
    assert!(last < 1e-4);
}

#[test]
fn fock_purity_and_positivity() {
    let mut rng = rng(14);
    let t = tol();
    let mut circuits: Vec<_> = (0..6).map(|_| random_one_mode_circuit(&mut rng, 1.0, 0.5, 1.0)).collect();
    circuits.push(random_two_mode_circuit(&mut rng, 0.3, 0.3, 0.5));
    for c in &circuits {
        let d = if c.n == 1 { 60 } else { 20 };
        let rho = circuit_to_fock(c, d, &FockOptions::forced(), &t).unwrap();
        let g = circuit_to_gaussian(c, &t).unwrap();
        assert!((rho.purity() - purity(&g)).abs() < 1e-5, "{} vs {}", rho.purity(), purity(&g));
        assert!(rho.check_positive(&t).unwrap() > -t.psd);
        assert!((rho.trace() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn three_mode_commuting_spot_check() {
    let t = tol();
    let thermal = |nbar: [f64; 3], q: f64| {
        let mut ops: Vec<_> = (0..3).map(|mode| CircuitOp::ThermalInit { mode, mean_photons: nbar[mode] }).collect();
        ops.push(CircuitOp::Displace { mode: 1, q, p: 0.0 });
        GaussianCircuit::new(3, ops).unwrap()
    };
    let a = thermal([0.2, 0.1, 0.15], 0.2);
    let b = thermal([0.1, 0.2, 0.05], -0.1);
    let c = oracle_compare(&a, &b, 12, &FockOptions::default(), &t).unwrap();
    assert_eq!(c.method, FidelityMethod::Commuting);
    assert!(c.passed, "{c:?}");
}

#[test]
fn unsupported_sizes_and_budget() {
    let t = tol();
    let three = GaussianCircuit::new(3, vec![]).unwrap();
    assert!(matches!(circuit_to_fock(&three, 13, &FockOptions::default(), &t), Err(Error::Unsupported(_))));
    let heavy = GaussianCircuit::new(1, vec![CircuitOp::ThermalInit { mode: 0, mean_photons: 3.0 }]).unwrap();
    match circuit_to_fock(&heavy, 4, &FockOptions::default(), &t) {
        Err(Error::CutoffTooSmall { suggested, .. }) => assert!(suggested >= 40),
        other => panic!("{other:?}"),
    }
    let squeezed = GaussianCircuit::new(1, vec![CircuitOp::Squeeze { mode: 0, r: 1.5, phase: 0.0 }]).unwrap();
    assert!(matches!(circuit_to_fock(&squeezed, 40, &FockOptions::default(), &t), Err(Error::InvalidCircuit(_))));
}

#[test]
fn fock_fidelity_is_symmetric_and_one_on_the_diagonal() {
    let mut rng = rng(15);
    let t = tol();
    let opts = FockOptions::forced();
    let rhos: Vec<_> = (0..3)
        .map(|_| circuit_to_fock(&random_one_mode_circuit(&mut rng, 1.0, 0.5, 1.0), 40, &opts, &t).unwrap())
        .collect();
    for a in &rhos {
        assert!((fock_fidelity(a, a, &t).unwrap() - 1.0).abs() < t.oracle(1));
        for b in &rhos {
            let (ab, ba) = (fock_fidelity(a, b, &t).unwrap(), fock_fidelity(b, a, &t).unwrap());
            assert!((ab - ba).abs() < t.oracle(1));
        }
    }
}
