//! Uhlmann fidelity between Gaussian states of bosonic modes.
//!
//! Conventions: `ħ = 1`, vacuum quadrature variance `1/2`, quadratures
//! ordered `(q1, p1, ..., qn, pn)` and symplectic form
//! `J = ⊕ [[0, 1], [-1, 0]]`.
//!
//! - [`state`] and [`symplectic`]: covariance matrices, validation,
//!   symplectic spectra and transformations.
//! - [`fidelity`]: closed forms for one and two modes, commuting inputs
//!   and pure inputs.
//! - [`fock`]: truncated Fock-space brute force used as an oracle.
//! - [`io`]: JSON documents, sweeps and the command implementations.

pub mod error;
pub mod fidelity;
pub mod fock;
pub mod io;
pub mod state;
pub mod symplectic;
pub mod tolerance;

pub use error::{Error, Result};
pub use fidelity::{fidelity, FidelityMethod, FidelityReport, InvariantTriple};
pub use state::GaussianState;
pub use tolerance::Tolerances;
