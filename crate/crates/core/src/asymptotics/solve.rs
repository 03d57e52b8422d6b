//! Sequential solution of the level equations for `β`, `ρ` and `c_n`.
//!
//! `γ` is never solved for explicitly: every computation happens in the
//! quotient ring modulo `γ^k + 1`, so a single pass covers all `k` roots at
//! once. Branching happens only on the roots of the `β` and `ρ` equations.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use super::ansatz::LevelEquation;
use super::ring::{square_split, QuotientRing, RingElem};
use super::ser_poly;
use crate::error::{Error, Result};
use crate::poly::{int, rat, Monomial, Poly, Rational, Sym};

/// Levels that fix the exponents. Everything at or below this level must
/// vanish on every branch returned by [`solve_levels`].
pub const EXPONENT_WINDOW: usize = 4;

/// One root of a monic polynomial of degree ≤ 2 in `ρ`:
/// `rational + surd·√radicand`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuadraticRoot {
    #[serde(serialize_with = "ser_poly")]
    pub rational: Poly,
    #[serde(serialize_with = "ser_poly")]
    pub surd: Poly,
    #[serde(serialize_with = "super::ser_opt_poly")]
    pub radicand: Option<Poly>,
    /// Monic equation, lowest coefficient first (leading 1 included).
    #[serde(serialize_with = "super::ser_poly_vec")]
    pub monic: Vec<Poly>,
}

impl QuadraticRoot {
    /// The root as a ring element (`s` standing for the square root).
    pub fn value(&self) -> Poly {
        &self.rational + &self.surd.mul_monomial(&Monomial::var(Sym::Surd, 1))
    }

    pub fn has_surd(&self) -> bool {
        !self.surd.is_zero()
    }

    /// Substitutes the root into its own monic equation.
    pub fn check(&self, ring: &QuotientRing) -> bool {
        let v = self.value();
        let mut acc = Poly::zero();
        let mut power = Poly::one();
        for c in &self.monic {
            acc += &ring.mul(c, &power);
            power = ring.mul(&power, &v);
        }
        ring.reduce(&acc).is_zero()
    }

    fn split(value: &Poly, ring: &QuotientRing, monic: Vec<Poly>) -> Self {
        let mut rational = Poly::zero();
        let mut surd = Poly::zero();
        for (m, c) in value.terms() {
            if m.exp(Sym::Surd) == 0 {
                rational.add_term(m.clone(), c.clone());
            } else {
                surd.add_term(m.without(Sym::Surd), c.clone());
            }
        }
        let radicand = if surd.is_zero() { None } else { ring.radicand().cloned() };
        QuadraticRoot { rational, surd, radicand, monic }
    }
}

impl std::fmt::Display for QuadraticRoot {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.radicand {
            Some(r) if !self.surd.is_zero() => {
                write!(f, "{} + ({})*sqrt({})", self.rational, self.surd, r)
            }
            _ => write!(f, "{}", self.rational),
        }
    }
}

/// A record of what one level contributed along a branch.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolveStep {
    pub level: usize,
    /// `None` when the level vanished identically.
    pub unknown: Option<String>,
    pub equation: String,
    pub solutions: Vec<String>,
}

/// A fully resolved asymptotic branch for one root `γ = e^{iπ·gamma_power/k}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExponentBranch {
    pub k: u32,
    /// Index `m` of the root `γ_m = e^{iπ(2m+1)/k}`.
    pub gamma_index: u32,
    /// `2m + 1`.
    pub gamma_power: u32,
    /// From `(γ^k + 1)^2`: every root is doubly degenerate.
    pub gamma_multiplicity: u32,
    #[serde(serialize_with = "ser_poly")]
    pub beta: RingElem,
    pub beta_index: usize,
    pub rho: QuadraticRoot,
    pub rho_index: usize,
    /// Level at which `ρ` was fixed.
    pub rho_level: usize,
    #[serde(serialize_with = "super::ser_poly_vec")]
    pub c: Vec<RingElem>,
    pub steps: Vec<SolveStep>,
    #[serde(skip)]
    pub ring: QuotientRing,
}

impl ExponentBranch {
    /// Values of the unknowns, in substitution order.
    fn knowns(&self) -> Vec<(Sym, Poly)> {
        let mut out = vec![(Sym::Beta, self.beta.clone()), (Sym::Rho, self.rho.value())];
        for (n, c) in self.c.iter().enumerate() {
            out.push((Sym::C(n as u16), c.clone()));
        }
        out
    }

    /// A level evaluated on this branch (zero when the branch satisfies it).
    pub fn residual(&self, level: &LevelEquation) -> Poly {
        evaluate(&self.ring, &level.poly, &self.knowns())
    }
}

/// Ring-aware substitution: powers of `value` are reduced as they are formed.
pub fn substitute_in_ring(ring: &QuotientRing, p: &Poly, sym: Sym, value: &Poly) -> Poly {
    if !p.contains(sym) {
        return ring.reduce(p);
    }
    let mut out = Poly::zero();
    let mut powers = vec![Poly::one()];
    for (e, coeff) in p.coefficients_in(sym) {
        assert!(e >= 0, "negative power of an unknown");
        while powers.len() <= e as usize {
            let next = ring.mul(powers.last().unwrap(), value);
            powers.push(next);
        }
        out += &(&coeff * &powers[e as usize]);
    }
    ring.reduce(&out)
}

fn evaluate(ring: &QuotientRing, p: &Poly, knowns: &[(Sym, Poly)]) -> Poly {
    let mut acc = ring.reduce(p);
    for (sym, value) in knowns {
        acc = substitute_in_ring(ring, &acc, *sym, value);
    }
    acc
}

/// Rational content: positive, and the quotient has coprime integer
/// coefficients.
fn content(p: &Poly) -> Rational {
    let mut num = BigInt::zero();
    let mut den = BigInt::one();
    for (_, c) in p.terms() {
        num = num.gcd(c.numer());
        den = den.lcm(c.denom());
    }
    Rational::new(num, den)
}

fn unsolvable(level: usize, reason: impl Into<String>, residual: &Poly) -> Error {
    Error::UnsolvableLevel { level, reason: reason.into(), residual: residual.to_string() }
}

/// Roots of `Σ coeffs[i] x^i` (degree 1 or 2) in the ring, adjoining a surd
/// if the discriminant has no square root. Returns the roots, the ring they
/// live in and the monic equation.
fn solve_low_degree(
    ring: &QuotientRing,
    coeffs: &[Poly],
    level: usize,
    eq: &Poly,
) -> Result<(Vec<Poly>, QuotientRing, Vec<Poly>)> {
    let lead = coeffs.last().unwrap();
    let inv = ring.inverse(lead).map_err(|e| match e {
        Error::DivisionByNonUnit(x) => Error::DivisionByNonUnit(format!(
            "{x} (leading coefficient at level {level})"
        )),
        other => other,
    })?;
    let monic: Vec<Poly> = coeffs.iter().map(|c| ring.mul(c, &inv)).collect();
    match coeffs.len() {
        2 => Ok((vec![-&monic[0]], ring.clone(), monic)),
        3 => {
            let b = &monic[1];
            let c = &monic[0];
            let half = rat(1, 2);
            let disc = ring.reduce(&(&ring.mul(b, b) - &c.scale(&int(4))));
            let minus_b_half = b.scale(&-half.clone());
            if disc.is_zero() {
                return Ok((vec![minus_b_half], ring.clone(), monic));
            }
            if let Some(r) = ring.sqrt_exact(&disc) {
                let r = r.scale(&half);
                let roots = vec![&minus_b_half + &r, &minus_b_half - &r];
                return Ok((roots, ring.clone(), monic));
            }
            if disc.contains(Sym::Surd) || !disc.unknowns().is_empty() {
                return Err(unsolvable(level, "discriminant has no square root in the ring", eq));
            }
            let q = content(&disc);
            let primitive = disc.scale(&q.recip());
            let (a, f) = square_split(&q);
            let radicand = primitive.scale(&Rational::from_integer(f));
            let extended = ring.with_surd(radicand).map_err(|_| {
                unsolvable(level, "a second square root would be needed", eq)
            })?;
            let r = Poly::term(a * half, Monomial::var(Sym::Surd, 1));
            let roots = vec![&minus_b_half + &r, &minus_b_half - &r];
            Ok((roots, extended, monic))
        }
        _ => Err(unsolvable(level, "equation is not of degree 1 or 2", eq)),
    }
}

/// Partial solution along one branch of the β/ρ tree.
#[derive(Clone, Debug)]
struct State {
    ring: QuotientRing,
    beta: Option<(Poly, usize)>,
    rho: Option<(QuadraticRoot, usize, usize)>,
    c: Vec<Poly>,
    steps: Vec<SolveStep>,
}

impl State {
    fn knowns(&self) -> Vec<(Sym, Poly)> {
        let mut out = Vec::new();
        if let Some((b, _)) = &self.beta {
            out.push((Sym::Beta, b.clone()));
        }
        if let Some((r, _, _)) = &self.rho {
            out.push((Sym::Rho, r.value()));
        }
        for (n, c) in self.c.iter().enumerate() {
            out.push((Sym::C(n as u16), c.clone()));
        }
        out
    }
}

/// Handles the level that should fix `c_n` once `ρ` is known.
fn tail_step(state: &mut State, level: usize, eq: Poly) -> Result<()> {
    let rho_level = state.rho.as_ref().unwrap().2;
    let n = level - rho_level;
    let sym = Sym::C(n as u16);
    debug_assert_eq!(state.c.len(), n);
    if eq.unknowns().iter().any(|&s| s != sym) {
        return Err(unsolvable(level, format!("equation for {sym} involves other unknowns"), &eq));
    }
    if !eq.contains(sym) {
        if !eq.is_zero() {
            return Err(unsolvable(
                level,
                format!("coefficient of {sym} vanishes but the residual does not"),
                &eq,
            ));
        }
        // Resonant index with a consistent equation: c_n is free.
        state.steps.push(SolveStep {
            level,
            unknown: Some(sym.to_string()),
            equation: "0".into(),
            solutions: vec!["0".into()],
        });
        state.c.push(Poly::zero());
        return Ok(());
    }
    let parts = eq.coefficients_in(sym);
    if parts.keys().any(|&e| e > 1) {
        return Err(unsolvable(level, format!("{sym} appears non-linearly"), &eq));
    }
    let coeffs = vec![parts.get(&0).cloned().unwrap_or_default(), parts[&1].clone()];
    let (roots, _, _) = solve_low_degree(&state.ring, &coeffs, level, &eq)?;
    state.steps.push(SolveStep {
        level,
        unknown: Some(sym.to_string()),
        equation: eq.to_string(),
        solutions: vec![roots[0].to_string()],
    });
    state.c.push(roots[0].clone());
    Ok(())
}

/// Processes one level, possibly splitting the state into several.
fn step(state: State, level: &LevelEquation) -> Result<Vec<State>> {
    let mut state = state;
    let l = level.level;
    let eq = evaluate(&state.ring, &level.poly, &state.knowns());
    if state.rho.is_some() {
        tail_step(&mut state, l, eq)?;
        return Ok(vec![state]);
    }
    if eq.is_zero() {
        state.steps.push(SolveStep { level: l, unknown: None, equation: "0".into(), solutions: vec![] });
        return Ok(vec![state]);
    }
    let unknowns = eq.unknowns();
    let lead = match unknowns.iter().next() {
        Some(&s) if s == Sym::Beta || s == Sym::Rho => s,
        Some(&s) => {
            return Err(unsolvable(l, format!("{s} appears before the exponents are fixed"), &eq))
        }
        None => return Err(unsolvable(l, "nonzero equation without unknowns", &eq)),
    };
    let parts = eq.coefficients_in(lead);
    if parts.values().any(|c| !c.unknowns().is_empty()) {
        return Err(unsolvable(l, format!("coefficients of {lead} involve other unknowns"), &eq));
    }
    let degree = *parts.keys().max().unwrap();
    if !(1..=2).contains(&degree) || parts.keys().any(|&e| e < 0) {
        return Err(unsolvable(l, format!("degree {degree} in {lead}"), &eq));
    }
    let coeffs: Vec<Poly> = (0..=degree).map(|e| parts.get(&e).cloned().unwrap_or_default()).collect();
    let (roots, ring, monic) = solve_low_degree(&state.ring, &coeffs, l, &eq)?;
    let solutions = match lead {
        Sym::Beta => roots.iter().map(|r| r.to_string()).collect(),
        _ => roots
            .iter()
            .map(|r| QuadraticRoot::split(r, &ring, monic.clone()).to_string())
            .collect(),
    };
    state.steps.push(SolveStep { level: l, unknown: Some(lead.to_string()), equation: eq.to_string(), solutions });
    let mut out = Vec::new();
    for (idx, root) in roots.into_iter().enumerate() {
        let mut next = state.clone();
        next.ring = ring.clone();
        if lead == Sym::Beta {
            next.beta = Some((root, idx));
        } else {
            next.rho = Some((QuadraticRoot::split(&root, &ring, monic.clone()), idx, l));
        }
        out.push(next);
    }
    Ok(out)
}

fn check_k(k: u32) -> Result<()> {
    match k {
        0 | 1 => Err(Error::InvalidInput(format!("no asymptotic analysis for k = {k}"))),
        2 => Err(Error::OutOfScope(
            "k = 2: the exponent of second kind need not be a root of unity, so the \
             quotient-ring analysis does not apply; see the Fock-space numerics for the \
             collapse at g = ω/2"
                .into(),
        )),
        _ => Ok(()),
    }
}

/// Solves the levels for `β` and `ρ` and returns every branch.
///
/// Levels up to [`EXPONENT_WINDOW`] (or up to the `ρ` level, if later) are
/// consumed; tail coefficients whose level falls in that window are fixed
/// too, so all those levels vanish on the returned branches. Branches are
/// ordered by `(gamma_power, beta_index, rho_index)`.
pub fn solve_levels(levels: &[LevelEquation], k: u32) -> Result<Vec<ExponentBranch>> {
    check_k(k)?;
    if levels.len() <= EXPONENT_WINDOW + 1 {
        return Err(Error::InvalidInput(format!(
            "need levels 0..=5 at least, got {}",
            levels.len()
        )));
    }
    let ring = QuotientRing::new(k)?;
    let mut start = State { ring: ring.clone(), beta: None, rho: None, c: vec![Poly::one()], steps: vec![] };
    let level0 = evaluate(&ring, &levels[0].poly, &start.knowns());
    if !level0.is_zero() {
        return Err(unsolvable(0, "leading level does not vanish for γ^k = -1", &level0));
    }
    start.steps.push(SolveStep {
        level: 0,
        unknown: Some(Sym::Gamma.to_string()),
        equation: levels[0].poly.specialize(Sym::C(0), &Rational::one())?.to_string(),
        solutions: vec![format!("g^{k} = -1 (double)")],
    });

    let mut frontier = vec![start];
    for level in &levels[1..] {
        let done = frontier.iter().all(|s| s.rho.is_some());
        if done && level.level > EXPONENT_WINDOW {
            break;
        }
        let mut next = Vec::new();
        for s in frontier {
            next.extend(step(s, level)?);
        }
        frontier = next;
    }
    if let Some(s) = frontier.iter().find(|s| s.rho.is_none()) {
        let last = levels.len() - 1;
        return Err(unsolvable(
            last,
            "exponent of first kind not fixed within the available levels",
            &evaluate(&s.ring, &levels[last].poly, &s.knowns()),
        ));
    }

    let mut branches = Vec::new();
    for m in 0..k {
        for s in &frontier {
            let (beta, beta_index) = s.beta.clone().unwrap_or((Poly::zero(), 0));
            let (rho, rho_index, rho_level) = s.rho.clone().unwrap();
            branches.push(ExponentBranch {
                k,
                gamma_index: m,
                gamma_power: 2 * m + 1,
                gamma_multiplicity: 2,
                beta,
                beta_index,
                rho,
                rho_index,
                rho_level,
                c: s.c.clone(),
                steps: s.steps.clone(),
                ring: s.ring.clone(),
            });
        }
    }
    branches.sort_by_key(|b| (b.gamma_power, b.beta_index, b.rho_index));
    Ok(branches)
}

/// Extends a branch with `c_1..c_{n_max}` from the levels beyond the `ρ`
/// level.
pub fn c_recursion(branch: &ExponentBranch, levels: &[LevelEquation], n_max: usize) -> Result<ExponentBranch> {
    let needed = branch.rho_level + n_max;
    if levels.len() <= needed {
        return Err(Error::InvalidInput(format!(
            "c_{n_max} needs level {needed}, only {} levels given",
            levels.len()
        )));
    }
    let mut state = State {
        ring: branch.ring.clone(),
        beta: Some((branch.beta.clone(), branch.beta_index)),
        rho: Some((branch.rho.clone(), branch.rho_index, branch.rho_level)),
        c: branch.c.clone(),
        steps: branch.steps.clone(),
    };
    for n in state.c.len()..=n_max {
        let level = &levels[branch.rho_level + n];
        let eq = evaluate(&state.ring, &level.poly, &state.knowns());
        tail_step(&mut state, level.level, eq)?;
    }
    let mut out = branch.clone();
    out.c = state.c;
    out.steps = state.steps;
    Ok(out)
}

/// `(2k − 3, 3k²/4 − 2k + 5/4)`: linear and constant coefficients of the
/// monic `ρ` equation for `k ≥ 5`.
pub fn rho_quadratic_general(k: u32) -> Result<(Rational, Rational)> {
    if k < 5 {
        return Err(Error::InvalidInput(format!("general ρ equation needs k >= 5, got {k}")));
    }
    let k = i64::from(k);
    Ok((int(2 * k - 3), rat(3 * k * k, 4) - int(2 * k) + rat(5, 4)))
}

/// Roots `(−k + 1)/2` and `(−3k + 5)/2` of the general equation.
pub fn rho_roots_general(k: u32) -> Result<(Rational, Rational)> {
    rho_quadratic_general(k)?;
    let k = i64::from(k);
    Ok((rat(1 - k, 2), rat(5 - 3 * k, 2)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics::substitute_ansatz;
    use crate::weyl::build_reduced_operator;

    fn levels(k: u32, depth: usize) -> Vec<LevelEquation> {
        substitute_ansatz(&build_reduced_operator(k).unwrap(), k, depth).unwrap()
    }

    #[test]
    fn general_quadratic() {
        let (b, c) = rho_quadratic_general(5).unwrap();
        assert_eq!((b, c), (int(7), int(10)));
        let (p, m) = rho_roots_general(6).unwrap();
        assert_eq!((p, m), (rat(-5, 2), rat(-13, 2)));
        assert!(rho_quadratic_general(4).is_err());
        for k in 5..=40u32 {
            let (b, c) = rho_quadratic_general(k).unwrap();
            let disc = &b * &b - c * int(4);
            assert_eq!(disc, int((i64::from(k) - 2).pow(2)));
        }
    }

    #[test]
    fn cubic_case() {
        let branches = solve_levels(&levels(3, 5), 3).unwrap();
        assert_eq!(branches.len(), 6);
        for b in &branches {
            assert_eq!(b.rho.value(), Poly::int(-2));
            let expected: Poly = "1/3*w*g^2".parse().unwrap();
            assert!(b.beta == expected || b.beta == -&expected);
            assert_eq!(b.rho_level, 3);
            assert_eq!(b.c.len(), 2);
        }
    }

    #[test]
    fn quartic_case() {
        let branches = solve_levels(&levels(4, 5), 4).unwrap();
        assert_eq!(branches.len(), 8);
        let eq: Vec<String> = branches[0].rho.monic.iter().map(|p| p.to_string()).collect();
        assert_eq!(eq, vec!["1/16*w^2 + 21/4", "5", "1"]);
        for b in &branches {
            assert!(b.beta.is_zero());
            assert_eq!(b.rho.rational, Poly::constant(rat(-5, 2)));
            assert!(b.rho.check(&b.ring));
            assert_eq!(b.rho.radicand.as_ref().unwrap().to_string(), "-w^2 + 16");
        }
        assert_eq!(branches[0].rho.surd, Poly::constant(rat(1, 4)));
        assert_eq!(branches[1].rho.surd, Poly::constant(rat(-1, 4)));
    }

    #[test]
    fn quintic_case_and_tail() {
        let lv = levels(5, 7);
        let branches = solve_levels(&lv, 5).unwrap();
        assert_eq!(branches.len(), 10);
        for b in &branches {
            let full = c_recursion(b, &lv, 2).unwrap();
            for l in &lv[..=6] {
                assert!(full.residual(l).is_zero(), "level {}", l.level);
            }
        }
        let rhos: Vec<Poly> = branches[..2].iter().map(|b| b.rho.value()).collect();
        assert_eq!(rhos, vec![Poly::int(-2), Poly::int(-5)]);
    }

    #[test]
    fn out_of_scope_and_depth_checks() {
        let lv = levels(3, 5);
        assert!(matches!(solve_levels(&lv, 2), Err(Error::OutOfScope(_))));
        assert!(solve_levels(&lv[..5], 3).is_err());
        let b = &solve_levels(&lv, 3).unwrap()[0];
        assert!(c_recursion(b, &lv, 4).is_err());
    }
}
