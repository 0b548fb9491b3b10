//! Brute-force Fock-space oracle.
//!
//! Circuits have two meanings: a symplectic one, giving a [`GaussianState`],
//! and a Fock-space one, giving a truncated density matrix. The fidelity of
//! the latter is evaluated straight from its definition and compared with
//! the closed forms.
//!
//! [`GaussianState`]: crate::state::GaussianState

mod circuit;
mod ops;
mod oracle;

pub use circuit::{circuit_to_gaussian, CircuitLimits, CircuitOp, GaussianCircuit};
pub use ops::{displacement_unitary, rotation_unitary, squeeze_unitary, BeamSplitterBlocks};
pub use oracle::{
    cf_check, circuit_to_fock, fock_characteristic, fock_fidelity, gaussian_characteristic, oracle_compare,
    FockDensityMatrix, FockOptions, OracleComparison,
};
