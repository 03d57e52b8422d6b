//! Sparse multivariate polynomials over the rationals.
//!
//! A [`Poly`] is a finite map from [`Monomial`] to a nonzero [`Rational`].
//! Exponents are signed so that parameter monomials (`w`, `d`, `E`) can be
//! inverted exactly; every other symbol is kept at non-negative powers by the
//! code that builds it.
//!
//! The textual form produced by `Display` and accepted by `FromStr` is the
//! canonical grammar used in derivation traces:
//!
//! ```text
//! poly    := ["-"] term (("+" | "-") term)*  |  "0"
//! term    := factor ("*" factor)*
//! factor  := int ["/" int]  |  symbol ["^" ["-"] int]
//! symbol  := "w" | "d" | "E" | "g" | "b" | "r" | "s" | "c" int
//! ```
//!
//! Terms are printed in descending monomial order, so equal polynomials
//! always print identically.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::Error;

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Formats a rational as `p` or `p/q`.
pub fn fmt_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `p`, `p/q` or `-p/q`.
pub fn parse_rational(s: &str) -> Result<Rational, Error> {
    let s = s.trim();
    let bad = || Error::InvalidInput(format!("malformed rational `{s}`"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

/// Symbols appearing in the engine.
///
/// `Omega`, `Delta`, `Energy` are model parameters; `Gamma`, `Beta`, `Rho`
/// the exponents of the asymptotic ansatz; `Surd` a formal square root
/// adjoined by a quadratic solve; `C(n)` the tail coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sym {
    Omega,
    Delta,
    Energy,
    Gamma,
    Beta,
    Rho,
    Surd,
    C(u16),
}

impl Sym {
    pub fn is_parameter(self) -> bool {
        matches!(self, Sym::Omega | Sym::Delta | Sym::Energy)
    }

    pub fn is_unknown(self) -> bool {
        matches!(self, Sym::Beta | Sym::Rho | Sym::C(_))
    }
}

impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sym::Omega => f.write_str("w"),
            Sym::Delta => f.write_str("d"),
            Sym::Energy => f.write_str("E"),
            Sym::Gamma => f.write_str("g"),
            Sym::Beta => f.write_str("b"),
            Sym::Rho => f.write_str("r"),
            Sym::Surd => f.write_str("s"),
            Sym::C(n) => write!(f, "c{n}"),
        }
    }
}

impl FromStr for Sym {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Ok(match s {
            "w" => Sym::Omega,
            "d" => Sym::Delta,
            "E" => Sym::Energy,
            "g" => Sym::Gamma,
            "b" => Sym::Beta,
            "r" => Sym::Rho,
            "s" => Sym::Surd,
            _ => {
                let idx = s
                    .strip_prefix('c')
                    .and_then(|n| n.parse::<u16>().ok())
                    .ok_or_else(|| Error::InvalidInput(format!("unknown symbol `{s}`")))?;
                Sym::C(idx)
            }
        })
    }
}

/// Product of symbol powers, sorted by symbol, no zero exponents.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<(Sym, i32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(sym: Sym, exp: i32) -> Self {
        if exp == 0 {
            Self::one()
        } else {
            Monomial(vec![(sym, exp)])
        }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Sym, i32)>) -> Self {
        let mut m = Self::one();
        for (s, e) in pairs {
            m = m.mul(&Monomial::var(s, e));
        }
        m
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exp(&self, sym: Sym) -> i32 {
        self.0
            .iter()
            .find(|(s, _)| *s == sym)
            .map_or(0, |&(_, e)| e)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Sym, i32)> + '_ {
        self.0.iter().copied()
    }

    /// Returns a copy with `sym` set to exponent `exp`.
    pub fn with(&self, sym: Sym, exp: i32) -> Self {
        let mut v: Vec<(Sym, i32)> = self.0.iter().copied().filter(|(s, _)| *s != sym).collect();
        if exp != 0 {
            v.push((sym, exp));
            v.sort_by_key(|(s, _)| *s);
        }
        Monomial(v)
    }

    pub fn without(&self, sym: Sym) -> Self {
        self.with(sym, 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            let (a, b) = (self.0[i], other.0[j]);
            match a.0.cmp(&b.0) {
                std::cmp::Ordering::Less => {
                    out.push(a);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    if a.1 + b.1 != 0 {
                        out.push((a.0, a.1 + b.1));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    pub fn inverse(&self) -> Monomial {
        Monomial(self.0.iter().map(|&(s, e)| (s, -e)).collect())
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (idx, (s, e)) in self.0.iter().enumerate() {
            if idx > 0 {
                f.write_str("*")?;
            }
            if *e == 1 {
                write!(f, "{s}")?;
            } else {
                write!(f, "{s}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Sparse polynomial with rational coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(Rational::one())
    }

    pub fn constant(q: Rational) -> Self {
        Poly::term(q, Monomial::one())
    }

    pub fn int(n: i64) -> Self {
        Poly::constant(int(n))
    }

    pub fn var(sym: Sym) -> Self {
        Poly::term(Rational::one(), Monomial::var(sym, 1))
    }

    pub fn var_pow(sym: Sym, exp: i32) -> Self {
        Poly::term(Rational::one(), Monomial::var(sym, exp))
    }

    pub fn term(q: Rational, m: Monomial) -> Self {
        let mut p = Poly::zero();
        if !q.is_zero() {
            p.terms.insert(m, q);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// The rational value if the polynomial is constant (zero included).
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn single_term(&self) -> Option<(&Monomial, &Rational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    pub fn add_term(&mut self, m: Monomial, q: Rational) {
        if q.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(q);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += q;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, q: &Rational) -> Poly {
        if q.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * q)).collect(),
        }
    }

    pub fn mul_monomial(&self, mono: &Monomial) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.mul(mono), c.clone())).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut out = Poly::one();
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    pub fn contains(&self, sym: Sym) -> bool {
        self.terms.keys().any(|m| m.exp(sym) != 0)
    }

    pub fn symbols(&self) -> BTreeSet<Sym> {
        self.terms
            .keys()
            .flat_map(|m| m.iter().map(|(s, _)| s))
            .collect()
    }

    pub fn unknowns(&self) -> BTreeSet<Sym> {
        self.symbols().into_iter().filter(|s| s.is_unknown()).collect()
    }

    /// Highest exponent of `sym` (0 if absent).
    pub fn degree(&self, sym: Sym) -> i32 {
        self.terms.keys().map(|m| m.exp(sym)).max().unwrap_or(0)
    }

    pub fn min_degree(&self, sym: Sym) -> i32 {
        self.terms.keys().map(|m| m.exp(sym)).min().unwrap_or(0)
    }

    /// Splits into coefficients of powers of `sym`.
    pub fn coefficients_in(&self, sym: Sym) -> BTreeMap<i32, Poly> {
        let mut out: BTreeMap<i32, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.exp(sym))
                .or_default()
                .add_term(m.without(sym), c.clone());
        }
        out
    }

    /// Replaces `sym` by `value`. Negative powers of `sym` are not allowed.
    pub fn substitute(&self, sym: Sym, value: &Poly) -> Poly {
        if !self.contains(sym) {
            return self.clone();
        }
        let mut powers: Vec<Poly> = vec![Poly::one()];
        let mut out = Poly::zero();
        for (e, coeff) in self.coefficients_in(sym) {
            assert!(e >= 0, "substitute: negative power of {sym}");
            while powers.len() <= e as usize {
                let next = powers.last().unwrap() * value;
                powers.push(next);
            }
            out += &(&coeff * &powers[e as usize]);
        }
        out
    }

    /// Replaces `sym` by a rational number, including negative powers.
    pub fn specialize(&self, sym: Sym, value: &Rational) -> Result<Poly, Error> {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let e = m.exp(sym);
            let factor = if e == 0 {
                Rational::one()
            } else if value.is_zero() {
                if e < 0 {
                    return Err(Error::InvalidInput(format!(
                        "cannot set {sym} = 0 in a term with a negative power"
                    )));
                }
                Rational::zero()
            } else {
                num_traits::pow::Pow::pow(value, e)
            };
            out.add_term(m.without(sym), c * factor);
        }
        Ok(out)
    }

    pub fn map_terms(&self, mut f: impl FnMut(&Monomial, &Rational) -> Poly) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            out += &f(m, c);
        }
        out
    }
}

impl From<Rational> for Poly {
    fn from(q: Rational) -> Self {
        Poly::constant(q)
    }
}

impl AddAssign<&Poly> for Poly {
    fn add_assign(&mut self, rhs: &Poly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl SubAssign<&Poly> for Poly {
    fn sub_assign(&mut self, rhs: &Poly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c.clone());
        }
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(mut self, rhs: Poly) -> Poly {
        self += &rhs;
        self
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(mut self, rhs: Poly) -> Poly {
        self -= &rhs;
        self
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            match (idx, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if m.is_one() {
                f.write_str(&fmt_rational(&mag))?;
            } else if mag.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{}*{m}", fmt_rational(&mag))?;
            }
        }
        Ok(())
    }
}

impl FromStr for Poly {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Parser::new(s).parse()
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    src: String,
}

impl Parser {
    fn new(src: &str) -> Self {
        Parser {
            tokens: Vec::new(),
            pos: 0,
            src: src.to_string(),
        }
    }

    fn err(&self, msg: &str) -> Error {
        Error::InvalidInput(format!("cannot parse polynomial `{}`: {msg}", self.src))
    }

    fn tokenize(&mut self) -> Result<(), Error> {
        let chars: Vec<char> = self.src.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let ch = chars[i];
            match ch {
                ' ' | '\t' | '\n' => i += 1,
                '+' => {
                    self.tokens.push(Token::Plus);
                    i += 1
                }
                '-' => {
                    self.tokens.push(Token::Minus);
                    i += 1
                }
                '*' => {
                    self.tokens.push(Token::Star);
                    i += 1
                }
                '/' => {
                    self.tokens.push(Token::Slash);
                    i += 1
                }
                '^' => {
                    self.tokens.push(Token::Caret);
                    i += 1
                }
                c if c.is_ascii_digit() => {
                    let start = i;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                    let text: String = chars[start..i].iter().collect();
                    self.tokens.push(Token::Int(text.parse().map_err(|_| self.err("bad integer"))?));
                }
                c if c.is_ascii_alphabetic() => {
                    let start = i;
                    i += 1;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                    self.tokens.push(Token::Ident(chars[start..i].iter().collect()));
                }
                _ => return Err(self.err(&format!("unexpected character `{ch}`"))),
            }
        }
        Ok(())
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn parse(mut self) -> Result<Poly, Error> {
        self.tokenize()?;
        if self.tokens.is_empty() {
            return Err(self.err("empty input"));
        }
        let mut out = Poly::zero();
        let mut sign = match self.peek() {
            Some(Token::Minus) => {
                self.pos += 1;
                -1
            }
            Some(Token::Plus) => {
                self.pos += 1;
                1
            }
            _ => 1,
        };
        loop {
            let t = self.term()?;
            if sign < 0 {
                out -= &t;
            } else {
                out += &t;
            }
            match self.next() {
                None => break,
                Some(Token::Plus) => sign = 1,
                Some(Token::Minus) => sign = -1,
                Some(_) => return Err(self.err("expected `+` or `-`")),
            }
        }
        Ok(out)
    }

    fn term(&mut self) -> Result<Poly, Error> {
        let mut acc = self.factor()?;
        while let Some(Token::Star) = self.peek() {
            self.pos += 1;
            let f = self.factor()?;
            acc = &acc * &f;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Poly, Error> {
        match self.next() {
            Some(Token::Int(n)) => {
                if let Some(Token::Slash) = self.peek() {
                    self.pos += 1;
                    match self.next() {
                        Some(Token::Int(d)) if !d.is_zero() => Ok(Poly::constant(Rational::new(n, d))),
                        _ => Err(self.err("expected nonzero denominator")),
                    }
                } else {
                    Ok(Poly::constant(Rational::from_integer(n)))
                }
            }
            Some(Token::Ident(name)) => {
                let sym: Sym = name.parse()?;
                let mut exp = 1i32;
                if let Some(Token::Caret) = self.peek() {
                    self.pos += 1;
                    let neg = if let Some(Token::Minus) = self.peek() {
                        self.pos += 1;
                        true
                    } else {
                        false
                    };
                    match self.next() {
                        Some(Token::Int(e)) => {
                            let e: i32 = e.try_into().map_err(|_| self.err("exponent too large"))?;
                            exp = if neg { -e } else { e };
                        }
                        _ => return Err(self.err("expected exponent")),
                    }
                }
                Ok(Poly::var_pow(sym, exp))
            }
            _ => Err(self.err("expected number or symbol")),
        }
    }
}
