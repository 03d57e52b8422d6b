//! Exact asymptotic analysis and truncated-Fock numerics for the k-photon
//! quantum Rabi model.

pub mod asymptotics;
pub mod cyclotomic;
pub mod error;
pub mod fock;
pub mod poly;
pub mod verdict;
pub mod weyl;

pub use error::{Error, Result};
