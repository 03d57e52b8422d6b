//! Combinatorics of `∂^m` acting on `e^{γz²/2} z^ρ`.
//!
//! Two independent routes: the expansion of
//! `e^{λ∂²/2} e^{γz²/2} = (1 − λγ)^{−1/2} exp(γz²/(2(1 − λγ)))`
//! in powers of `λ, γ, z`, and plain repeated differentiation.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::{int, rat, Rational};
use crate::weyl::{a1_closed, a2_closed};

/// Largest `m` accepted by [`brute_force_exponent_oracle`].
pub const ORACLE_MAX_M: u32 = 24;

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// `η_l = C(2l, l)/4^l`, the coefficients of `(1 − x)^{−1/2}`.
pub fn eta(l: u32) -> Rational {
    let c = factorial(2 * l) / (factorial(l) * factorial(l));
    Rational::new(c, BigInt::from(4).pow(l))
}

/// Multisets `{n_j}` of parts `j ≥ 1` with exactly `count` parts summing to
/// `total`, as `(j, n_j)` lists.
fn partitions(total: u32, count: u32) -> Vec<Vec<(u32, u32)>> {
    fn go(total: u32, count: u32, max_part: u32, acc: &mut Vec<(u32, u32)>, out: &mut Vec<Vec<(u32, u32)>>) {
        if count == 0 {
            if total == 0 {
                out.push(acc.clone());
            }
            return;
        }
        if max_part == 0 || total < count {
            return;
        }
        // Use part `max_part` some number of times, then only smaller parts.
        let most = (total / max_part).min(count);
        for n in (0..=most).rev() {
            if n > 0 {
                acc.push((max_part, n));
            }
            go(total - n * max_part, count - n, max_part - 1, acc, out);
            if n > 0 {
                acc.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(total, count, total.max(1), &mut Vec::new(), &mut out);
    out
}

/// Coefficient of `λ^a γ^b z^c` in `e^{−γz²/2} G(λ, γ, z)`.
///
/// A term is labelled by `n_0` (from the square-root prefactor) and
/// multiplicities `n_j` (from `(λ^j γ^{j+1} z²/2)^{n_j}/n_j!`); it contributes
/// when `n_0 + Σ j n_j = a`, `n_0 + Σ (j+1) n_j = b` and `2 Σ n_j = c`.
pub fn gf_term(a: u32, b: u32, c: u32) -> Rational {
    if c % 2 != 0 || b < a || b - a != c / 2 {
        return Rational::zero();
    }
    let parts = c / 2;
    let mut sum = Rational::zero();
    for n0 in 0..=a {
        for p in partitions(a - n0, parts) {
            let denom = p.iter().fold(BigInt::one(), |acc, &(_, n)| acc * factorial(n))
                * BigInt::from(2).pow(parts);
            sum += eta(n0) / Rational::from_integer(denom);
        }
    }
    sum
}

/// `C_0^{(m)}`: coefficient of `γ^{m−2} z^{m−4}` in `e^{−γz²/2} ∂^m e^{γz²/2}`.
///
/// Even `m = 2n` reads the `λ^n` coefficient of the generating function
/// (times `2^n n!`); odd `m = 2l + 1` uses `C_0^{(2l+1)} = (2l−2)(2l−1)l + C_0^{(2l)}`.
pub fn gf_coefficient(m: u32) -> Result<Rational> {
    if m < 4 {
        return Err(Error::InvalidInput(format!("C_0 needs m >= 4, got {m}")));
    }
    if m % 2 == 0 {
        let n = m / 2;
        let scale = Rational::from_integer(BigInt::from(2).pow(n) * factorial(n));
        Ok(gf_term(n, m - 2, m - 4) * scale)
    } else {
        let l = i64::from(m / 2);
        Ok(int((2 * l - 2) * (2 * l - 1) * l) + gf_coefficient(m - 1)?)
    }
}

/// `m(m³ − 6m² + 11m − 6)/8`.
pub fn c0_closed(m: u32) -> Rational {
    let m = i64::from(m);
    rat(m * (m * m * m - 6 * m * m + 11 * m - 6), 8)
}

/// `C_0^{(2k)}` written as `3/2·k(k−1) + 6k(k−1)(k−2) + 2k(k−1)(k−2)(k−3)`.
pub fn c0_even_form(k: u32) -> Rational {
    let k = i64::from(k);
    rat(3 * k * (k - 1), 2) + int(6 * k * (k - 1) * (k - 2)) + int(2 * k * (k - 1) * (k - 2) * (k - 3))
}

/// The four `ρ`-coefficients entering the `ρ` level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrhoCoefficients {
    /// Coefficient of `γ^{2k−2} ρ²` from `∂^{2k}`.
    pub c2k_rho2: Rational,
    /// Coefficient of `γ^{2k−2} ρ` from `∂^{2k}`.
    pub c2k_rho: Rational,
    /// Coefficient of `γ^{k−2} ρ²` from `∂^k`.
    pub ck_rho2: Rational,
    /// Coefficient of `γ^{k−2} ρ` from `∂^k`.
    pub ck_rho: Rational,
}

/// Closed forms, meaningful for `k ≥ 5`.
pub fn crho_closed(k: u32) -> CrhoCoefficients {
    let k = i64::from(k);
    CrhoCoefficients {
        c2k_rho2: int(k * (2 * k - 1)),
        c2k_rho: int(4 * k * k * k - 8 * k * k + 3 * k),
        ck_rho2: rat(k * (k - 1), 2),
        ck_rho: rat(k * (k * k + 3), 2) - int(2 * k * k),
    }
}

/// Coefficients of `∂^m (e^{γz²/2} z^ρ) / (e^{γz²/2} z^ρ)`, keyed by the
/// powers of `γ`, `ρ` and `z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleTable {
    pub m: u32,
    pub depth: u32,
    entries: BTreeMap<(u32, u32, i64), BigInt>,
}

impl OracleTable {
    pub fn coeff(&self, gamma: u32, rho: u32, z: i64) -> BigInt {
        self.entries.get(&(gamma, rho, z)).cloned().unwrap_or_default()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(u32, u32, i64), &BigInt)> {
        self.entries.iter()
    }

    /// `(C_{ρ²}, C_ρ, C_0)` at `γ^{m−2} z^{m−4}`.
    pub fn rho_coefficients(&self) -> (BigInt, BigInt, BigInt) {
        let (g, z) = (self.m - 2, i64::from(self.m) - 4);
        (self.coeff(g, 2, z), self.coeff(g, 1, z), self.coeff(g, 0, z))
    }
}

/// Applies `∂` `m` times to `e^{γz²/2} z^ρ` (with `β = 0`), keeping terms at
/// most `depth` levels below the leading `γ^m z^m`.
pub fn brute_force_exponent_oracle(m: u32, depth: u32) -> Result<OracleTable> {
    if m > ORACLE_MAX_M {
        return Err(Error::CostGuard(format!(
            "oracle limited to m <= {ORACLE_MAX_M}, got {m}"
        )));
    }
    // (power of γ, z offset) → polynomial in ρ, lowest power first.
    let mut state: BTreeMap<(u32, i64), Vec<BigInt>> = BTreeMap::new();
    state.insert((0, 0), vec![BigInt::one()]);
    for step in 1..=m {
        let mut next: BTreeMap<(u32, i64), Vec<BigInt>> = BTreeMap::new();
        let mut add = |key: (u32, i64), p: Vec<BigInt>| {
            let slot = next.entry(key).or_default();
            if slot.len() < p.len() {
                slot.resize(p.len(), BigInt::zero());
            }
            for (s, v) in slot.iter_mut().zip(p) {
                *s += v;
            }
        };
        for (&(a, c), p) in &state {
            // γz factor from the exponential
            add((a + 1, c + 1), p.clone());
            // (ρ + c)/z from the power
            if step - a <= depth {
                let mut q = vec![BigInt::zero(); p.len() + 1];
                for (i, v) in p.iter().enumerate() {
                    q[i] += v * BigInt::from(c);
                    q[i + 1] += v;
                }
                add((a, c - 1), q);
            }
        }
        state = next;
    }
    let mut entries = BTreeMap::new();
    for ((a, c), p) in state {
        for (b, v) in p.into_iter().enumerate() {
            if !v.is_zero() {
                entries.insert((a, b as u32, c), v);
            }
        }
    }
    Ok(OracleTable { m, depth, entries })
}

/// The four `ρ` coefficients read off the oracle for `∂^{2k}` and `∂^k`.
pub fn crho_from_oracle(k: u32) -> Result<CrhoCoefficients> {
    let (r2, r1, _) = brute_force_exponent_oracle(2 * k, 2)?.rho_coefficients();
    let (s2, s1, _) = brute_force_exponent_oracle(k, 2)?.rho_coefficients();
    Ok(CrhoCoefficients {
        c2k_rho2: Rational::from_integer(r2),
        c2k_rho: Rational::from_integer(r1),
        ck_rho2: Rational::from_integer(s2),
        ck_rho: Rational::from_integer(s1),
    })
}

/// Assembles the `ρ` level from the C-coefficients, folds `γ^{2k−2}` into
/// `−γ^{k−2}` and normalizes to a monic quadratic. Returns the linear and
/// constant coefficients.
pub fn assemble_final1(k: u32, c: &CrhoCoefficients) -> Result<(Rational, Rational)> {
    if k < 5 {
        return Err(Error::InvalidInput(format!("assembly needs k >= 5, got {k}")));
    }
    let kk = i64::from(k);
    let a1 = a1_closed(k);
    let a2 = a2_closed(k);
    let two = int(2);
    // γ^{2k−2}[…] + γ^{k−2}[…] with γ^{2k−2} = −γ^{k−2}
    let q2 = &two * &c.ck_rho2 - &c.c2k_rho2;
    let q1 = &two * &c.ck_rho + int(kk - 1) * &a1 - &c.c2k_rho;
    let q0 = &two * c0_closed(k) + int((kk - 2) * (kk - 1)) / &two * &a1 + a2 - c0_closed(2 * k);
    if q2.is_zero() {
        return Err(Error::InvalidInput("degenerate ρ equation".into()));
    }
    Ok((q1 / &q2, q0 / q2))
}
