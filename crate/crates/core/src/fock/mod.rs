//! Truncated Fock-space numerics for the k-photon Rabi and Jaynes–Cummings
//! Hamiltonians.
//!
//! The coupling is taken along `σ_x` and the splitting along `σ_z`; swapping
//! the two is a unitary relabeling and leaves every spectrum unchanged.

pub mod band;
pub mod eigen;
pub mod models;
pub mod sweep;

pub use band::BandedSymmetricMatrix;
pub use eigen::{lowest_eigenvalues, tridiagonal_lowest, tridiagonalize};
pub use models::*;
pub use sweep::*;
