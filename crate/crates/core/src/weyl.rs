//! Normal-ordered polynomial differential operators in `z` and `∂_z`.
//!
//! Coefficients are exact polynomials in the model parameters `ω`, `Δ`, `E`
//! (the coupling `g` is fixed to 1 in the symbolic work). An
//! [`OperatorPoly`] stores `Σ p_ij z^i ∂^j` with every `z` to the left of
//! every `∂`; products are brought back to that form with the Leibniz rule
//! `∂^b z^c = Σ_t C(b,t) c!/(c-t)! z^{c-t} ∂^{b-t}`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::{fmt_rational, int, Monomial, Poly, Rational, Sym};

/// Polynomial in `(ω, Δ, E)` with big-rational coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ParamPoly {
    terms: BTreeMap<[u32; 3], Rational>,
}

impl ParamPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(q: Rational) -> Self {
        Self::monomial(q, [0, 0, 0])
    }

    pub fn int(n: i64) -> Self {
        Self::constant(int(n))
    }

    pub fn monomial(q: Rational, exps: [u32; 3]) -> Self {
        let mut p = Self::zero();
        p.add_term(exps, q);
        p
    }

    pub fn omega() -> Self {
        Self::monomial(Rational::one(), [1, 0, 0])
    }

    pub fn delta() -> Self {
        Self::monomial(Rational::one(), [0, 1, 0])
    }

    pub fn energy() -> Self {
        Self::monomial(Rational::one(), [0, 0, 1])
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32; 3], &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: [u32; 3]) -> Rational {
        self.terms.get(&exps).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_term(&mut self, exps: [u32; 3], q: Rational) {
        if q.is_zero() {
            return;
        }
        let slot = self.terms.entry(exps).or_insert_with(Rational::zero);
        *slot += q;
        if slot.is_zero() {
            self.terms.remove(&exps);
        }
    }

    pub fn scale(&self, q: &Rational) -> Self {
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            out.add_term(*e, c * q);
        }
        out
    }

    /// Lifts into the general polynomial ring used by the level solver.
    pub fn to_poly(&self) -> Poly {
        let mut p = Poly::zero();
        for (e, c) in &self.terms {
            let m = Monomial::from_pairs([
                (Sym::Omega, e[0] as i32),
                (Sym::Delta, e[1] as i32),
                (Sym::Energy, e[2] as i32),
            ]);
            p.add_term(m, c.clone());
        }
        p
    }

    /// Number of terms; used to decide whether printing needs parentheses.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

impl Add for &ParamPoly {
    type Output = ParamPoly;
    fn add(self, rhs: &ParamPoly) -> ParamPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl Sub for &ParamPoly {
    type Output = ParamPoly;
    fn sub(self, rhs: &ParamPoly) -> ParamPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, -c.clone());
        }
        out
    }
}

impl Neg for &ParamPoly {
    type Output = ParamPoly;
    fn neg(self) -> ParamPoly {
        self.scale(&-Rational::one())
    }
}

impl Mul for &ParamPoly {
    type Output = ParamPoly;
    fn mul(self, rhs: &ParamPoly) -> ParamPoly {
        let mut out = ParamPoly::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                out.add_term([ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]], ca * cb);
            }
        }
        out
    }
}

impl fmt::Display for ParamPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_poly().fmt(f)
    }
}

/// Polynomial in `z` with [`ParamPoly`] coefficients, keyed by power of `z`.
pub type ZPoly = BTreeMap<u32, ParamPoly>;

fn zpoly_add(p: &mut ZPoly, power: u32, c: ParamPoly) {
    if c.is_zero() {
        return;
    }
    let slot = p.entry(power).or_default();
    *slot = &*slot + &c;
    if slot.is_zero() {
        p.remove(&power);
    }
}

/// `Σ p_ij z^i ∂_z^j` in normal order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OperatorPoly {
    terms: BTreeMap<(u32, u32), ParamPoly>,
}

impl OperatorPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, 0, ParamPoly::one())
    }

    pub fn scalar(p: ParamPoly) -> Self {
        Self::monomial(0, 0, p)
    }

    /// `z^i`
    pub fn z(i: u32) -> Self {
        Self::monomial(i, 0, ParamPoly::one())
    }

    /// `∂_z^j`
    pub fn d(j: u32) -> Self {
        Self::monomial(0, j, ParamPoly::one())
    }

    pub fn monomial(i: u32, j: u32, p: ParamPoly) -> Self {
        let mut op = Self::zero();
        op.add_term(i, j, p);
        op
    }

    pub fn add_term(&mut self, i: u32, j: u32, p: ParamPoly) {
        if p.is_zero() {
            return;
        }
        let slot = self.terms.entry((i, j)).or_default();
        *slot = &*slot + &p;
        if slot.is_zero() {
            self.terms.remove(&(i, j));
        }
    }

    pub fn coeff(&self, i: u32, j: u32) -> ParamPoly {
        self.terms.get(&(i, j)).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &ParamPoly)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn z_degree(&self) -> u32 {
        self.terms.keys().map(|&(i, _)| i).max().unwrap_or(0)
    }

    pub fn d_degree(&self) -> u32 {
        self.terms.keys().map(|&(_, j)| j).max().unwrap_or(0)
    }

    /// Largest `i + j` over all terms.
    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|&(i, j)| i + j).max().unwrap_or(0)
    }

    pub fn scale(&self, p: &ParamPoly) -> Self {
        let mut out = Self::zero();
        for (&(i, j), c) in &self.terms {
            out.add_term(i, j, c * p);
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..n {
            out = op_mul(&out, self);
        }
        out
    }
}

impl Add for &OperatorPoly {
    type Output = OperatorPoly;
    fn add(self, rhs: &OperatorPoly) -> OperatorPoly {
        let mut out = self.clone();
        for (&(i, j), c) in &rhs.terms {
            out.add_term(i, j, c.clone());
        }
        out
    }
}

impl Sub for &OperatorPoly {
    type Output = OperatorPoly;
    fn sub(self, rhs: &OperatorPoly) -> OperatorPoly {
        let mut out = self.clone();
        for (&(i, j), c) in &rhs.terms {
            out.add_term(i, j, -c);
        }
        out
    }
}

impl Mul for &OperatorPoly {
    type Output = OperatorPoly;
    fn mul(self, rhs: &OperatorPoly) -> OperatorPoly {
        op_mul(self, rhs)
    }
}

impl fmt::Display for OperatorPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        // Highest total degree first, then by power of ∂.
        let mut keys: Vec<&(u32, u32)> = self.terms.keys().collect();
        keys.sort_by(|a, b| (b.0 + b.1, b.1).cmp(&(a.0 + a.1, a.1)));
        for (idx, key) in keys.into_iter().enumerate() {
            let (i, j) = *key;
            let c = &self.terms[key];
            let mut coeff = c.to_string();
            let negative = c.len() == 1 && coeff.starts_with('-');
            if negative {
                coeff.remove(0);
            }
            match (idx, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let mut factors = Vec::new();
            if i > 0 {
                factors.push(if i == 1 { "z".to_string() } else { format!("z^{i}") });
            }
            if j > 0 {
                factors.push(if j == 1 { "D".to_string() } else { format!("D^{j}") });
            }
            let body = factors.join("*");
            if body.is_empty() {
                if c.len() > 1 {
                    write!(f, "({coeff})")?;
                } else {
                    f.write_str(&coeff)?;
                }
            } else if c.len() > 1 {
                write!(f, "({coeff})*{body}")?;
            } else if coeff == "1" {
                f.write_str(&body)?;
            } else {
                write!(f, "{coeff}*{body}")?;
            }
        }
        Ok(())
    }
}

fn binomial(n: u32, k: u32) -> BigInt {
    let mut acc = BigInt::one();
    for t in 0..k {
        acc = acc * BigInt::from(n - t) / BigInt::from(t + 1);
    }
    acc
}

fn falling(n: u32, k: u32) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, t| acc * BigInt::from(n - t))
}

/// Normal-ordered product `A·B`.
pub fn op_mul(a: &OperatorPoly, b: &OperatorPoly) -> OperatorPoly {
    let mut out = OperatorPoly::zero();
    for (&(ai, aj), ac) in &a.terms {
        for (&(bi, bj), bc) in &b.terms {
            let prod = ac * bc;
            for t in 0..=aj.min(bi) {
                let w = binomial(aj, t) * falling(bi, t);
                out.add_term(ai + bi - t, aj + bj - t, prod.scale(&Rational::from_integer(w)));
            }
        }
    }
    out
}

/// Exact action of an operator on a polynomial in `z`.
pub fn apply_to_polynomial(op: &OperatorPoly, p: &ZPoly) -> ZPoly {
    let mut out = ZPoly::new();
    for (&(i, j), c) in &op.terms {
        for (&m, pc) in p {
            if j > m {
                continue;
            }
            let w = Rational::from_integer(falling(m, j));
            zpoly_add(&mut out, m - j + i, (c * pc).scale(&w));
        }
    }
    out
}

/// `a_j^{(n)}` from the three-term recurrence seeded by `a_0^{(n)} = 1`.
pub fn a_coeff(j: u32, n: u32) -> Rational {
    a_table(n).get(j as usize).cloned().unwrap_or_else(Rational::zero)
}

/// `[a_0^{(n)}, …, a_n^{(n)}]`.
pub fn a_table(n: u32) -> Vec<Rational> {
    // Row m holds a_j^{(m)} for j = 0..=m; entries beyond m are zero.
    let mut row: Vec<Rational> = vec![Rational::one()];
    for m in 1..=n {
        let mut next = vec![Rational::zero(); m as usize + 1];
        let prev = |l: i64| -> Rational {
            if l < 0 {
                Rational::zero()
            } else {
                row.get(l as usize).cloned().unwrap_or_else(Rational::zero)
            }
        };
        for (j, slot) in next.iter_mut().enumerate() {
            let j = j as i64;
            let m = m as i64;
            *slot = if j == 0 {
                Rational::one()
            } else {
                prev(j) + int(2 * m - 2 * j + 1) * prev(j - 1) + int((m - j + 1).pow(2)) * prev(j - 2)
            };
        }
        row = next;
    }
    row
}

pub fn a1_closed(n: u32) -> Rational {
    int(i64::from(n).pow(2))
}

pub fn a2_closed(n: u32) -> Rational {
    let n = i64::from(n);
    Rational::new(BigInt::from((n - 1).pow(2) * n * n), BigInt::from(2))
}

/// `(z^k + ∂^k)^2` in normal order.
pub fn coupling_square(k: u32) -> OperatorPoly {
    let b = &OperatorPoly::z(k) + &OperatorPoly::d(k);
    op_mul(&b, &b)
}

fn free_part() -> OperatorPoly {
    // ωz∂ − E
    &OperatorPoly::monomial(1, 1, ParamPoly::omega()) - &OperatorPoly::scalar(ParamPoly::energy())
}

/// Reduced operator acting on the first spinor component, in the published
/// sign convention (leading term `−∂^{2k}`):
///
/// `(ωz∂ − E)^2 − (z^k + ∂^k)^2 + ωk z^{k−1} − Δ^2`.
///
/// This is the form whose `k = 3` and `k = 4` instances are written out term
/// by term; it carries no `∂^{k−1}` term. Use [`elimination_operator`] for
/// the operator obtained by eliminating the second component directly.
pub fn build_reduced_operator(k: u32) -> Result<OperatorPoly> {
    if k < 2 {
        return Err(Error::InvalidInput(format!(
            "reduced operator needs k >= 2, got {k}"
        )));
    }
    let a = free_part();
    let mut op = &op_mul(&a, &a) - &coupling_square(k);
    op.add_term(k - 1, 0, ParamPoly::omega().scale(&int(i64::from(k))));
    op.add_term(0, 0, -(&(&ParamPoly::delta() * &ParamPoly::delta())));
    Ok(op)
}

/// `(A − B)(A + B) − Δ^2` with `A = ωz∂ − E`, `B = z^k + ∂^k`: the operator
/// left after substituting the second eigenvalue equation into the first.
/// Equals `A^2 − B^2 + ωk(z^k − ∂^k) − Δ^2`.
pub fn elimination_operator(k: u32) -> Result<OperatorPoly> {
    if k < 1 {
        return Err(Error::InvalidInput("k must be positive".into()));
    }
    let a = free_part();
    let b = &OperatorPoly::z(k) + &OperatorPoly::d(k);
    let mut op = op_mul(&(&a - &b), &(&a + &b));
    op.add_term(0, 0, -(&(&ParamPoly::delta() * &ParamPoly::delta())));
    Ok(op)
}

/// Renders `a_j^{(k)}` for `j = 1..=k` as `j a_j` lines.
pub fn format_a_table(k: u32) -> String {
    a_table(k)
        .iter()
        .enumerate()
        .skip(1)
        .map(|(j, a)| format!("{j} {}", fmt_rational(a)))
        .collect::<Vec<_>>()
        .join("\n")
}
