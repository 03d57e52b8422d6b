//! Exact arithmetic in `Q(ζ_N)` via reduction modulo the cyclotomic
//! polynomial `Φ_N`. Polynomials are coefficient vectors, lowest power first.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::poly::Rational;

fn trim(mut p: Vec<Rational>) -> Vec<Rational> {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

/// Remainder of `a` modulo the monic polynomial `m`.
pub fn rem_monic(a: &[Rational], m: &[Rational]) -> Vec<Rational> {
    let mut r = trim(a.to_vec());
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = r.last().unwrap().clone();
        let shift = r.len() - 1 - dm;
        for (i, c) in m.iter().enumerate() {
            r[shift + i] -= &lead * c;
        }
        r = trim(r);
    }
    r
}

/// Exact quotient of `a` by the monic `m` (the remainder must be zero).
fn div_monic(a: &[Rational], m: &[Rational]) -> Vec<Rational> {
    let mut r = trim(a.to_vec());
    let dm = m.len() - 1;
    let mut q = vec![Rational::zero(); r.len().saturating_sub(dm)];
    while r.len() > dm {
        let lead = r.last().unwrap().clone();
        let shift = r.len() - 1 - dm;
        q[shift] = lead.clone();
        for (i, c) in m.iter().enumerate() {
            r[shift + i] -= &lead * c;
        }
        r = trim(r);
    }
    debug_assert!(r.is_empty(), "inexact cyclotomic division");
    q
}

/// `Φ_n`, from `x^n − 1 = Π_{d | n} Φ_d`.
pub fn cyclotomic(n: u32) -> Vec<Rational> {
    assert!(n >= 1);
    let mut p = vec![Rational::zero(); n as usize + 1];
    p[0] = -Rational::one();
    p[n as usize] = Rational::one();
    for d in 1..n {
        if n % d == 0 {
            p = div_monic(&p, &cyclotomic(d));
        }
    }
    p
}

/// Whether `Σ c_e ζ_N^e` has zero real part, i.e. `x + x̄ ≡ 0 (mod Φ_N)`.
pub fn real_part_is_zero(terms: &[(Rational, i64)], n: u32) -> bool {
    let nn = i64::from(n);
    let mut sym = vec![Rational::zero(); n as usize];
    for (c, e) in terms {
        sym[e.rem_euclid(nn) as usize] += c;
        sym[(-e).rem_euclid(nn) as usize] += c;
    }
    rem_monic(&sym, &cyclotomic(n)).is_empty()
}

/// Integer coefficients of `Φ_n`, for display and tests.
pub fn cyclotomic_integer(n: u32) -> Vec<BigInt> {
    cyclotomic(n).into_iter().map(|c| c.to_integer()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::int;

    #[test]
    fn small_cyclotomics() {
        let ints = |v: &[i64]| v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>();
        assert_eq!(cyclotomic_integer(1), ints(&[-1, 1]));
        assert_eq!(cyclotomic_integer(4), ints(&[1, 0, 1]));
        assert_eq!(cyclotomic_integer(12), ints(&[1, 0, -1, 0, 1]));
        assert_eq!(cyclotomic_integer(6), ints(&[1, -1, 1]));
    }

    #[test]
    fn real_parts() {
        // ζ_12^3 = i
        assert!(real_part_is_zero(&[(int(1), 3)], 12));
        assert!(!real_part_is_zero(&[(int(1), 0)], 12));
        // ζ_6 + ζ_6^2 = i√3
        assert!(real_part_is_zero(&[(int(1), 1), (int(1), 2)], 6));
        assert!(!real_part_is_zero(&[(int(1), 1)], 6));
    }
}
