//! Arithmetic in `Q[ω^±, Δ^±, E^±][γ]/(γ^k + 1)`, optionally extended by one
//! formal square root `s` with `s^2 = R`.
//!
//! Ring elements are plain [`Poly`] values kept in reduced form: the power of
//! `γ` lies in `0..k` and the power of `s` in `0..2`. Unknowns (`b`, `r`,
//! `c_n`) may ride along as polynomial variables.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::poly::{Monomial, Poly, Rational, Sym};

/// An element of the quotient ring. Always stored reduced.
pub type RingElem = Poly;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientRing {
    k: u32,
    radicand: Option<Poly>,
}

impl QuotientRing {
    pub fn new(k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidInput("quotient ring needs k >= 1".into()));
        }
        Ok(QuotientRing { k, radicand: None })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn radicand(&self) -> Option<&Poly> {
        self.radicand.as_ref()
    }

    /// Adjoins `s` with `s^2 = radicand`. Only one surd is supported.
    pub fn with_surd(&self, radicand: Poly) -> Result<Self> {
        if self.radicand.is_some() {
            return Err(Error::InvalidInput(
                "a second square root cannot be adjoined".into(),
            ));
        }
        if radicand.contains(Sym::Surd) || radicand.is_zero() {
            return Err(Error::InvalidInput(format!("bad radicand `{radicand}`")));
        }
        let radicand = self.reduce(&radicand);
        Ok(QuotientRing { k: self.k, radicand: Some(radicand) })
    }

    /// The generator `γ`.
    pub fn gamma(&self) -> RingElem {
        self.reduce(&Poly::var(Sym::Gamma))
    }

    /// Reduces `γ^e` to `±γ^{e mod k}` and `s^f` to `R^{⌊f/2⌋} s^{f mod 2}`.
    pub fn reduce(&self, p: &Poly) -> RingElem {
        let k = self.k as i32;
        let mut out = Poly::zero();
        for (m, c) in p.terms() {
            let e = m.exp(Sym::Gamma);
            let f = m.exp(Sym::Surd);
            let sign = if e.div_euclid(k) % 2 == 0 { c.clone() } else { -c.clone() };
            let base = m.with(Sym::Gamma, e.rem_euclid(k));
            if f < 2 {
                assert!(f >= 0, "negative power of the surd");
                out.add_term(base, sign);
                continue;
            }
            let r = self
                .radicand
                .as_ref()
                .expect("surd power without an adjoined radicand");
            let lifted = &Poly::term(sign, base.with(Sym::Surd, f % 2)) * &r.pow((f / 2) as u32);
            out += &self.reduce(&lifted);
        }
        out
    }

    pub fn mul(&self, a: &RingElem, b: &RingElem) -> RingElem {
        self.reduce(&(a * b))
    }

    /// Single terms whose monomial involves only parameters and `γ`.
    fn monomial_unit(p: &Poly) -> Option<(&Monomial, &Rational)> {
        let (m, c) = p.single_term()?;
        m.iter()
            .all(|(s, _)| s.is_parameter() || s == Sym::Gamma)
            .then_some((m, c))
    }

    fn split_surd(p: &Poly) -> (Poly, Poly) {
        let mut a = Poly::zero();
        let mut b = Poly::zero();
        for (m, c) in p.terms() {
            match m.exp(Sym::Surd) {
                0 => a.add_term(m.clone(), c.clone()),
                _ => b.add_term(m.without(Sym::Surd), c.clone()),
            }
        }
        (a, b)
    }

    /// Inverse of a unit: `q·γ^j·(Laurent monomial in ω, Δ, E)`, or `a + b s`
    /// whose norm `a^2 − b^2 R` is such a monomial.
    pub fn inverse(&self, x: &RingElem) -> Result<RingElem> {
        let x = self.reduce(x);
        if let Some((m, c)) = Self::monomial_unit(&x) {
            return Ok(self.reduce(&Poly::term(c.recip(), m.inverse())));
        }
        if let Some(r) = &self.radicand {
            if x.contains(Sym::Surd) {
                let (a, b) = Self::split_surd(&x);
                let norm = self.reduce(&(&(&a * &a) - &(&(&b * &b) * r)));
                if let Some((m, c)) = Self::monomial_unit(&norm) {
                    let conj = &a - &b.mul_monomial(&Monomial::var(Sym::Surd, 1));
                    let inv_norm = Poly::term(c.recip(), m.inverse());
                    return Ok(self.reduce(&(&conj * &inv_norm)));
                }
            }
        }
        Err(Error::DivisionByNonUnit(x.to_string()))
    }

    pub fn div(&self, a: &RingElem, b: &RingElem) -> Result<RingElem> {
        Ok(self.mul(a, &self.inverse(b)?))
    }

    /// An exact square root inside the ring, if one is found.
    ///
    /// Handles zero and single terms `q·γ^j·m` with `m` a square parameter
    /// monomial; `−1 = γ^k` is used to move signs into the power of `γ`.
    /// A positive rational part gets the positive root.
    pub fn sqrt_exact(&self, x: &RingElem) -> Option<RingElem> {
        let x = self.reduce(x);
        if x.is_zero() {
            return Some(x);
        }
        let (m, q) = Self::monomial_unit(&x)?;
        if m.iter().any(|(s, e)| s != Sym::Gamma && e % 2 != 0) {
            return None;
        }
        let j = m.exp(Sym::Gamma);
        let k = self.k as i32;
        let mut candidates = vec![(q.clone(), j)];
        if j % 2 != 0 && k % 2 != 0 || q.is_negative() && k % 2 == 0 {
            candidates.push((-q.clone(), j + k));
        }
        for (q, j) in candidates {
            if j % 2 != 0 || q.is_negative() {
                continue;
            }
            if let Some(root) = rational_sqrt(&q) {
                let half = Monomial::from_pairs(m.iter().map(|(s, e)| (s, e / 2)))
                    .with(Sym::Gamma, j / 2);
                return Some(self.reduce(&Poly::term(root, half)));
            }
        }
        None
    }
}

/// Square root of a non-negative rational when both parts are perfect squares.
pub fn rational_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| Rational::new(n, d))
}

/// Writes a positive rational as `a^2 · f` with `f` a squarefree integer
/// (as far as trial division up to 10^6 can tell), returning `(a, f)`.
pub fn square_split(q: &Rational) -> (Rational, BigInt) {
    assert!(q.is_positive());
    // q = n/d = (n·d)/d^2
    let mut rest = q.numer() * q.denom();
    let mut square = BigInt::one();
    let mut p = BigInt::from(2);
    let limit = BigInt::from(1_000_000);
    while &p * &p <= rest && p <= limit {
        let pp = &p * &p;
        while (&rest % &pp).is_zero() {
            rest /= &pp;
            square *= &p;
        }
        p += 1;
    }
    (Rational::new(square, q.denom().clone()), rest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{int, rat};

    fn p(s: &str) -> Poly {
        s.parse().unwrap()
    }

    #[test]
    fn gamma_is_a_unit() {
        for k in 1..=9 {
            let r = QuotientRing::new(k).unwrap();
            let g = r.gamma();
            let inv = r.inverse(&g).unwrap();
            assert_eq!(r.mul(&g, &inv), Poly::one(), "k={k}");
            assert_eq!(r.reduce(&Poly::var_pow(Sym::Gamma, k as i32)), Poly::int(-1));
        }
    }

    #[test]
    fn reduction_examples() {
        let r = QuotientRing::new(5).unwrap();
        assert!(r.reduce(&p("g^10 + 2*g^5 + 1")).is_zero());
        assert_eq!(r.reduce(&p("g^8")), p("-g^3"));
        assert_eq!(r.reduce(&p("g^-1")), p("-g^4"));
        let r3 = QuotientRing::new(3).unwrap();
        assert_eq!(r3.reduce(&p("b*g^7")), p("b*g"));
    }

    #[test]
    fn laurent_units_and_non_units() {
        let r = QuotientRing::new(3).unwrap();
        let x = p("-2/3*w*g^2");
        let inv = r.inverse(&x).unwrap();
        assert_eq!(r.mul(&x, &inv), Poly::one());
        assert!(matches!(r.inverse(&p("1 + g")), Err(Error::DivisionByNonUnit(_))));
        assert!(r.inverse(&Poly::zero()).is_err());
        assert!(r.inverse(&p("b")).is_err());
    }

    #[test]
    fn surd_units_via_conjugate() {
        let r = QuotientRing::new(4).unwrap().with_surd(p("w^2 + 1")).unwrap();
        assert_eq!(r.reduce(&p("s^3")), p("w^2*s + s"));
        // (w + s)(w − s) = w^2 − (w^2 + 1) = −1
        let x = p("w + s");
        let inv = r.inverse(&x).unwrap();
        assert_eq!(r.mul(&x, &inv), Poly::one());
        assert!(r.inverse(&p("2 + s")).is_err());
    }

    #[test]
    fn exact_square_roots() {
        let r3 = QuotientRing::new(3).unwrap();
        let x = p("-1/9*w^2*g");
        let y = r3.sqrt_exact(&x).unwrap();
        assert_eq!(r3.mul(&y, &y), x);
        assert_eq!(y, p("1/3*w*g^2"));
        assert_eq!(r3.sqrt_exact(&p("9")), Some(Poly::int(3)));
        assert_eq!(r3.sqrt_exact(&p("-1")), None);
        assert_eq!(r3.sqrt_exact(&p("2")), None);
        assert_eq!(r3.sqrt_exact(&p("w^2 + 1")), None);

        let r4 = QuotientRing::new(4).unwrap();
        let i = r4.sqrt_exact(&p("-4")).unwrap();
        assert_eq!(r4.mul(&i, &i), Poly::int(-4));
        assert_eq!(r4.sqrt_exact(&p("g")), None);
    }

    #[test]
    fn splitting_squares() {
        assert_eq!(square_split(&rat(1, 4)), (rat(1, 2), BigInt::one()));
        assert_eq!(square_split(&int(12)), (int(2), BigInt::from(3)));
        assert_eq!(square_split(&rat(3, 2)), (rat(1, 2), BigInt::from(6)));
        assert_eq!(rational_sqrt(&rat(9, 16)), Some(rat(3, 4)));
        assert_eq!(rational_sqrt(&rat(2, 1)), None);
    }
}
