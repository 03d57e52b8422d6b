//! Substitution of `e^{γz²/2 + βz} z^ρ Σ_n c_n z^{−n}` into a normal-ordered
//! operator.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::{Poly, Sym};
use crate::weyl::OperatorPoly;

/// Largest depth accepted by [`substitute_ansatz`] unless a different cap
/// is passed to [`substitute_ansatz_capped`].
pub const DEFAULT_DEPTH_CAP: usize = 32;

/// Smallest depth that resolves all exponents.
pub const MIN_DEPTH: usize = 5;

/// `e^{γz²/2+βz} z^ρ Σ_t p_t z^{s−t}` truncated to `t ≤ depth`, stored with
/// the exponential prefactor and `z^ρ` divided out.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnsatzSeries {
    top: i64,
    terms: Vec<Poly>,
}

impl AnsatzSeries {
    /// The bare ansatz `Σ_{n ≤ depth} c_n z^{−n}`.
    pub fn new(depth: usize) -> Self {
        let terms = (0..=depth).map(|n| Poly::var(Sym::C(n as u16))).collect();
        AnsatzSeries { top: 0, terms }
    }

    pub fn top(&self) -> i64 {
        self.top
    }

    pub fn depth(&self) -> usize {
        self.terms.len() - 1
    }

    /// Coefficient of `z^{ρ + top − t}`.
    pub fn term(&self, t: usize) -> &Poly {
        &self.terms[t]
    }

    /// `∂_z` applied to the full function, with the prefactor divided out
    /// again. Each term `p z^{ρ+e}` yields `γp z^{ρ+e+1} + βp z^{ρ+e} +
    /// (ρ+e)p z^{ρ+e−1}`; terms below the depth are dropped.
    pub fn derivative(&self) -> AnsatzSeries {
        let gamma = Poly::var(Sym::Gamma);
        let beta = Poly::var(Sym::Beta);
        let rho = Poly::var(Sym::Rho);
        let len = self.terms.len();
        let mut terms = Vec::with_capacity(len);
        for t in 0..len {
            let mut acc = &gamma * &self.terms[t];
            if t >= 1 {
                acc += &(&beta * &self.terms[t - 1]);
            }
            if t >= 2 {
                let e = self.top - (t as i64 - 2);
                let factor = &rho + &Poly::int(e);
                acc += &(&factor * &self.terms[t - 2]);
            }
            terms.push(acc);
        }
        AnsatzSeries { top: self.top + 1, terms }
    }
}

/// Coefficient `b_{2k−l}` of `z^{ρ+2k−l}` after dividing out the prefactor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelEquation {
    pub level: usize,
    #[serde(serialize_with = "crate::asymptotics::ser_poly")]
    pub poly: Poly,
}

pub fn substitute_ansatz(op: &OperatorPoly, k: u32, depth: usize) -> Result<Vec<LevelEquation>> {
    substitute_ansatz_capped(op, k, depth, DEFAULT_DEPTH_CAP)
}

/// Levels `0..=depth` of the operator applied to the ansatz. The ansatz
/// coefficients `c_0..c_depth` and the exponents stay symbolic; `γ` is not
/// reduced.
pub fn substitute_ansatz_capped(
    op: &OperatorPoly,
    k: u32,
    depth: usize,
    cap: usize,
) -> Result<Vec<LevelEquation>> {
    if depth > cap {
        return Err(Error::DepthOverflow { depth, cap });
    }
    if depth < MIN_DEPTH {
        return Err(Error::InvalidInput(format!(
            "depth must be at least {MIN_DEPTH}, got {depth}"
        )));
    }
    let top = 2 * k;
    if op.total_degree() > top {
        return Err(Error::InvalidInput(format!(
            "operator has total degree {} above 2k = {top}",
            op.total_degree()
        )));
    }
    let mut derivs = vec![AnsatzSeries::new(depth)];
    for _ in 0..op.d_degree() {
        let next = derivs.last().unwrap().derivative();
        derivs.push(next);
    }
    let mut levels: Vec<Poly> = vec![Poly::zero(); depth + 1];
    for (&(i, j), coeff) in op.terms() {
        let coeff = coeff.to_poly();
        let series = &derivs[j as usize];
        // z^i ∂^j contributes to level l through term t = i + j − 2k + l.
        let shift = (top - i - j) as usize;
        for (l, level) in levels.iter_mut().enumerate().skip(shift) {
            *level += &(&coeff * series.term(l - shift));
        }
    }
    Ok(levels
        .into_iter()
        .enumerate()
        .map(|(level, poly)| LevelEquation { level, poly })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weyl::build_reduced_operator;

    #[test]
    fn derivative_of_bare_ansatz() {
        let d = AnsatzSeries::new(5).derivative();
        assert_eq!(d.top(), 1);
        assert_eq!(d.term(0).to_string(), "g*c0");
        assert_eq!(d.term(1).to_string(), "b*c0 + g*c1");
        assert_eq!(d.term(2).to_string(), "r*c0 + b*c1 + g*c2");
    }

    #[test]
    fn level_zero_is_a_double_root_in_gamma() {
        for k in 3..=8u32 {
            let op = build_reduced_operator(k).unwrap();
            let levels = substitute_ansatz(&op, k, 5).unwrap();
            assert_eq!(levels.len(), 6);
            let kk = k as i32;
            let g = Poly::var(Sym::Gamma);
            let sq = (&g.pow(k) + &Poly::one()).pow(2);
            let expected = -&(&sq * &Poly::var(Sym::C(0)));
            assert_eq!(levels[0].poly, expected, "k={kk}");
        }
    }

    #[test]
    fn depth_guards() {
        let op = build_reduced_operator(3).unwrap();
        assert!(matches!(
            substitute_ansatz(&op, 3, 40),
            Err(Error::DepthOverflow { depth: 40, cap: 32 })
        ));
        assert!(substitute_ansatz(&op, 3, 4).is_err());
        assert!(substitute_ansatz_capped(&op, 3, 40, 64).is_ok());
        assert!(substitute_ansatz(&op, 2, 5).is_err());
    }
}
