//! Asymptotic exponents of the reduced operator at the irregular singular
//! point `z = ∞`.
//!
//! The pipeline is [`substitute_ansatz`] (level equations), [`solve_levels`]
//! (`γ`, `β`, `ρ`) and [`c_recursion`] (tail coefficients). The [`genfun`]
//! submodule checks the combinatorics behind the general `ρ` equation by two
//! independent routes.

pub mod ansatz;
pub mod genfun;
pub mod ring;
pub mod solve;

pub use ansatz::{
    substitute_ansatz, substitute_ansatz_capped, AnsatzSeries, LevelEquation, DEFAULT_DEPTH_CAP,
    MIN_DEPTH,
};
pub use genfun::{
    assemble_final1, brute_force_exponent_oracle, c0_closed, c0_even_form, crho_closed,
    crho_from_oracle, gf_coefficient, gf_term, CrhoCoefficients, OracleTable,
};
pub use ring::{QuotientRing, RingElem};
pub use solve::{
    c_recursion, rho_quadratic_general, rho_roots_general, solve_levels, substitute_in_ring,
    ExponentBranch, QuadraticRoot, SolveStep, EXPONENT_WINDOW,
};

use serde::Serializer;

use crate::poly::Poly;

pub(crate) fn ser_poly<S: Serializer>(p: &Poly, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(p)
}

pub(crate) fn ser_opt_poly<S: Serializer>(p: &Option<Poly>, s: S) -> Result<S::Ok, S::Error> {
    match p {
        Some(p) => s.collect_str(p),
        None => s.serialize_none(),
    }
}

pub(crate) fn ser_poly_vec<S: Serializer>(v: &[Poly], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|p| p.to_string()))
}
