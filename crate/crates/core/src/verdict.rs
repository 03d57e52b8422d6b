//! Normalizability of the asymptotic branches and the resulting verdict on
//! self-adjointness.
//!
//! Every comparison is exact: values of `ρ` have the form `a + b√R` with
//! rational `a, b, R` once `ω` is fixed, and signs of such numbers are
//! certified by comparing squares.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_integer::Integer;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::asymptotics::ring::square_split;
use crate::asymptotics::{solve_levels, substitute_ansatz, ExponentBranch, QuadraticRoot, MIN_DEPTH};
use crate::cyclotomic::real_part_is_zero;
use crate::error::{Error, Result};
use crate::poly::{fmt_rational, int, rat, Poly, Rational, Sym};
use crate::weyl::build_reduced_operator;

/// Ray `z(r) = r·e^{−iθ/2}` along which `|e^{γz²/2}|² = e^{r²}` matches the
/// Gaussian weight. Angles are rational multiples of `π`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriticalLine {
    pub gamma_power: u32,
    /// `arg γ / π`, in `(−1, 1]`.
    pub theta: Rational,
    /// `arg z / π = −θ/2`.
    pub direction: Rational,
}

/// One line per root of `γ^k = −1`, `θ_m = (2m+1)π/k`, ordered by `m`.
pub fn critical_lines(k: u32) -> Result<Vec<CriticalLine>> {
    if k < 3 {
        return Err(Error::InvalidInput(format!("critical lines need k >= 3, got {k}")));
    }
    Ok((0..k)
        .map(|m| {
            let mut theta = rat(i64::from(2 * m + 1), i64::from(k));
            if theta > int(1) {
                theta -= int(2);
            }
            let direction = -&theta / int(2);
            CriticalLine { gamma_power: 2 * m + 1, theta, direction }
        })
        .collect())
}

/// Whether `|e^{βz}| ≡ 1` along `line`, with `γ` taken at the branch's own
/// root `e^{iπ·gamma_power/k}`.
pub fn beta_unit_modulus(branch: &ExponentBranch, line: &CriticalLine) -> Result<bool> {
    let phi = rat(i64::from(branch.gamma_power), i64::from(branch.k));
    beta_unit_modulus_at(&branch.beta, &phi, line)
}

/// Whether `Re(β e^{−iθ/2}) = 0` identically in the parameters, with
/// `γ = e^{iπφ}` and `θ` the angle of `line`.
///
/// `β` is split by parameter monomial; each group lies in `Q(ζ_N)` with
/// `ζ_N = e^{iπ/L}`, and its real part is tested modulo `Φ_N`.
pub fn beta_unit_modulus_at(beta: &Poly, phi: &Rational, line: &CriticalLine) -> Result<bool> {
    if beta.contains(Sym::Surd) || !beta.unknowns().is_empty() || beta.contains(Sym::Energy) {
        return Err(Error::InvalidInput(format!("cannot evaluate β = {beta} on a line")));
    }
    let l = phi.denom().lcm(&(line.theta.denom() * 2u32));
    let too_big = || Error::InvalidInput("angle denominator too large".into());
    let gamma_exp: i64 = (phi * Rational::from(l.clone())).to_integer().try_into().map_err(|_| too_big())?;
    let dir_exp: i64 = (&line.direction * Rational::from(l.clone())).to_integer().try_into().map_err(|_| too_big())?;
    let n: u32 = (l * 2u32).try_into().map_err(|_| too_big())?;
    let mut groups: BTreeMap<_, Vec<(Rational, i64)>> = BTreeMap::new();
    for (m, c) in beta.terms() {
        let j = i64::from(m.exp(Sym::Gamma));
        groups
            .entry(m.without(Sym::Gamma))
            .or_default()
            .push((c.clone(), gamma_exp * j + dir_exp));
    }
    Ok(groups.values().all(|terms| real_part_is_zero(terms, n)))
}

/// `ρ` at a fixed rational `ω`. Surds are normalized so that `f` is a
/// squarefree integer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RhoValue {
    Rational(Rational),
    /// `a + b√f`, `f > 1`.
    RealSurd { a: Rational, b: Rational, f: BigInt },
    /// `a + i·b√f`, `f ≥ 1`.
    Complex { a: Rational, b: Rational, f: BigInt },
}

fn surd_text(b: &Rational, f: &BigInt, unit: &str) -> String {
    let sep = if unit.is_empty() { "" } else { "*" };
    if f.is_one() {
        format!("{}{sep}{unit}", fmt_rational(b))
    } else {
        format!("{}{sep}{unit}*sqrt({f})", fmt_rational(b))
    }
}

impl RhoValue {
    pub fn real_part_approx(&self) -> f64 {
        match self {
            RhoValue::Rational(a) | RhoValue::Complex { a, .. } => to_f64(a),
            RhoValue::RealSurd { a, b, f } => to_f64(a) + to_f64(b) * to_f64(&Rational::from(f.clone())).sqrt(),
        }
    }

    pub fn is_real(&self) -> bool {
        !matches!(self, RhoValue::Complex { .. })
    }

    /// Sign of `Re ρ − t`.
    pub fn compare_re(&self, t: &Rational) -> Ordering {
        match self {
            RhoValue::Rational(a) | RhoValue::Complex { a, .. } => a.cmp(t),
            RhoValue::RealSurd { a, b, f } => surd_sign(&(a - t), b, &Rational::from(f.clone())),
        }
    }

    fn json(&self) -> Value {
        match self {
            RhoValue::Rational(a) => json!({ "re": fmt_rational(a) }),
            RhoValue::RealSurd { a, b, f } => json!({ "re": fmt_rational(a), "surd": surd_text(b, f, "") }),
            RhoValue::Complex { a, b, f } => json!({ "re": fmt_rational(a), "im": surd_text(b, f, "") }),
        }
    }
}

impl std::fmt::Display for RhoValue {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let (a, b, f, unit) = match self {
            RhoValue::Rational(a) => return write!(out, "{}", fmt_rational(a)),
            RhoValue::RealSurd { a, b, f } => (a, b, f, ""),
            RhoValue::Complex { a, b, f } => (a, b, f, "i"),
        };
        let sign = if b.is_negative() { '-' } else { '+' };
        write!(out, "{} {sign} {}", fmt_rational(a), surd_text(&b.abs(), f, unit))
    }
}

fn to_f64(q: &Rational) -> f64 {
    num_traits::ToPrimitive::to_f64(q).unwrap_or(f64::NAN)
}

/// Sign of `x + y√r` for `r > 0`, exactly.
pub fn surd_sign(x: &Rational, y: &Rational, r: &Rational) -> Ordering {
    let sx = x.cmp(&Rational::zero());
    let sy = y.cmp(&Rational::zero());
    if sy == Ordering::Equal || sx == sy {
        return if sx == Ordering::Equal { sy } else { sx };
    }
    if sx == Ordering::Equal {
        return sy;
    }
    // Opposite signs: the larger magnitude wins.
    match (x * x).cmp(&(y * y * r)) {
        Ordering::Greater => sx,
        Ordering::Less => sy,
        Ordering::Equal => Ordering::Equal,
    }
}

fn as_rational(p: &Poly, what: &str) -> Result<Rational> {
    p.as_constant().ok_or_else(|| {
        Error::InvalidInput(format!("{what} `{p}` still depends on symbols other than ω"))
    })
}

/// Evaluates a root at `ω`. `Δ`, `E` and `γ` must not occur.
pub fn evaluate_rho(rho: &QuadraticRoot, omega: &Rational) -> Result<RhoValue> {
    let a = as_rational(&rho.rational.specialize(Sym::Omega, omega)?, "ρ")?;
    if rho.surd.is_zero() {
        return Ok(RhoValue::Rational(a));
    }
    let b = as_rational(&rho.surd.specialize(Sym::Omega, omega)?, "ρ")?;
    let radicand = rho.radicand.as_ref().expect("surd without radicand");
    let r = as_rational(&radicand.specialize(Sym::Omega, omega)?, "radicand")?;
    if r.is_zero() || b.is_zero() {
        return Ok(RhoValue::Rational(a));
    }
    let (scale, f) = square_split(&r.abs());
    let b = b * scale;
    if r.is_negative() {
        Ok(RhoValue::Complex { a, b, f })
    } else if f.is_one() {
        Ok(RhoValue::Rational(a + b))
    } else {
        Ok(RhoValue::RealSurd { a, b, f })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormalizabilityReport {
    pub gamma_power: u32,
    pub beta_index: usize,
    pub rho_index: usize,
    pub rho: RhoValue,
    /// `Re ρ < −1/2`, decided exactly.
    pub normalizable: bool,
    /// Whether `|e^{βz}| ≡ 1` on the branch's critical line.
    pub beta_unit_modulus: bool,
}

pub fn normalizability(branch: &ExponentBranch, omega: &Rational) -> Result<NormalizabilityReport> {
    if !omega.is_positive() {
        return Err(Error::InvalidInput("ω must be positive".into()));
    }
    let rho = evaluate_rho(&branch.rho, omega)?;
    let normalizable = rho.compare_re(&rat(-1, 2)) == Ordering::Less;
    let line = critical_lines(branch.k)?
        .into_iter()
        .find(|l| l.gamma_power == branch.gamma_power)
        .expect("branch root has a critical line");
    Ok(NormalizabilityReport {
        gamma_power: branch.gamma_power,
        beta_index: branch.beta_index,
        rho_index: branch.rho_index,
        rho,
        normalizable,
        beta_unit_modulus: beta_unit_modulus(branch, &line)?,
    })
}

/// `k + 2ρ ≥ −1`: the integrand `r^{k+2ρ}` of `⟨φ|z^k|φ⟩` along a critical
/// line is not integrable at infinity (the boundary case diverges
/// logarithmically).
pub fn symmetry_divergence(k: u32, rho: &RhoValue) -> Result<bool> {
    if !rho.is_real() {
        return Err(Error::ComplexExponent(format!("ρ = {rho}")));
    }
    let threshold = rat(-(i64::from(k) + 1), 2);
    Ok(rho.compare_re(&threshold) != Ordering::Less)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    SelfAdjoint,
    NotSelfAdjoint,
    OutOfScope,
}

/// Per-branch record of a verdict.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchReport {
    pub branch: ExponentBranch,
    pub normalizability: NormalizabilityReport,
    /// `None` when `ρ` is complex.
    pub symmetry_divergent: Option<bool>,
}

/// The derivation behind a verdict.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerdictTrace {
    pub k: u32,
    pub operator: String,
    pub depth: usize,
    /// Generic branches (before fanning out over the roots of `γ^k = −1`).
    pub branches: Vec<ExponentBranch>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerdictReport {
    pub k: u32,
    pub omega: Rational,
    pub delta: Rational,
    pub verdict: Verdict,
    pub reason: String,
    /// No `E` in any `β` or `ρ`.
    pub energy_free: bool,
    pub branches: Vec<BranchReport>,
    pub critical_lines: Vec<CriticalLine>,
    pub trace: Option<VerdictTrace>,
}

impl VerdictReport {
    pub fn trace_json(&self) -> String {
        serde_json::to_string(&self.trace).expect("trace serializes")
    }

    /// `sha256:` followed by the hex digest of [`Self::trace_json`].
    pub fn trace_ref(&self) -> String {
        let digest = Sha256::digest(self.trace_json().as_bytes());
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        format!("sha256:{hex}")
    }

    pub fn to_json(&self) -> Value {
        let branches: Vec<Value> = self
            .branches
            .iter()
            .map(|b| {
                json!({
                    "gamma_power": b.branch.gamma_power,
                    "beta_index": b.branch.beta_index,
                    "rho_index": b.branch.rho_index,
                    "beta": b.branch.beta.to_string(),
                    "rho": b.normalizability.rho.json(),
                    "normalizable": b.normalizability.normalizable,
                    "symmetry_divergent": b.symmetry_divergent,
                    "beta_unit_modulus": b.normalizability.beta_unit_modulus,
                })
            })
            .collect();
        json!({
            "k": self.k,
            "omega": fmt_rational(&self.omega),
            "delta": fmt_rational(&self.delta),
            "verdict": self.verdict,
            "reason": self.reason,
            "energy_free": self.energy_free,
            "branches": branches,
            "critical_lines": self.critical_lines.iter().map(|l| fmt_rational(&l.theta)).collect::<Vec<_>>(),
            "trace_ref": self.trace_ref(),
        })
    }
}

fn free_of_energy(b: &ExponentBranch) -> bool {
    let polys = [&b.beta, &b.rho.rational, &b.rho.surd]
        .into_iter()
        .chain(b.rho.radicand.iter())
        .chain(b.rho.monic.iter());
    polys.into_iter().all(|p| !p.contains(Sym::Energy))
}

/// Runs the whole pipeline for one `(k, ω, Δ)`.
///
/// `k = 1` is answered without computation (the coupling is relatively
/// bounded by the free part with bound below one, so Kato–Rellich applies).
/// `k = 2` lies outside the quotient-ring analysis. For `k ≥ 3`, `ω` and `Δ`
/// stay symbolic through the solve and `ω` is substituted only for the sign
/// decisions.
pub fn verdict(k: u32, omega: &Rational, delta: &Rational) -> Result<VerdictReport> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    if !omega.is_positive() {
        return Err(Error::InvalidInput("ω must be positive".into()));
    }
    let base = VerdictReport {
        k,
        omega: omega.clone(),
        delta: delta.clone(),
        verdict: Verdict::OutOfScope,
        reason: String::new(),
        energy_free: true,
        branches: vec![],
        critical_lines: vec![],
        trace: None,
    };
    match k {
        1 => {
            return Ok(VerdictReport {
                verdict: Verdict::SelfAdjoint,
                reason: "k = 1: the coupling is infinitesimally bounded by the free oscillator \
                         (Kato-Rellich); no asymptotic computation needed"
                    .into(),
                ..base
            })
        }
        2 => {
            return Ok(VerdictReport {
                reason: "k = 2: exponents are not roots of unity and the asymptotic theory here \
                         does not apply; use the Fock-space sweep to see the collapse at g = ω/2"
                    .into(),
                ..base
            })
        }
        _ => {}
    }
    let op = build_reduced_operator(k)?;
    let levels = substitute_ansatz(&op, k, MIN_DEPTH)?;
    let branches = solve_levels(&levels, k)?;
    let lines = critical_lines(k)?;
    let mut reports = Vec::with_capacity(branches.len());
    for b in &branches {
        let norm = normalizability(b, omega)?;
        let divergent = match symmetry_divergence(k, &norm.rho) {
            Ok(d) => Some(d),
            Err(Error::ComplexExponent(_)) => None,
            Err(e) => return Err(e),
        };
        reports.push(BranchReport { branch: b.clone(), normalizability: norm, symmetry_divergent: divergent });
    }
    let energy_free = branches.iter().all(free_of_energy);
    let all_normalizable = reports.iter().all(|r| r.normalizability.normalizable);
    let (verdict, reason) = if all_normalizable && energy_free {
        (
            Verdict::NotSelfAdjoint,
            format!(
                "all {} branches have Re(rho) < -1/2 with E-free exponents: normalizable \
                 eigenfunctions exist for every complex E",
                reports.len()
            ),
        )
    } else if !energy_free {
        (Verdict::OutOfScope, "an exponent depends on E; the argument does not apply".into())
    } else {
        (
            Verdict::OutOfScope,
            "some branch is not normalizable; normalizability alone decides nothing".into(),
        )
    };
    let generic: Vec<ExponentBranch> = branches.iter().filter(|b| b.gamma_index == 0).cloned().collect();
    let trace = VerdictTrace { k, operator: op.to_string(), depth: MIN_DEPTH, branches: generic };
    Ok(VerdictReport {
        verdict,
        reason,
        energy_free,
        branches: reports,
        critical_lines: lines,
        trace: Some(trace),
        ..base
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_lines() {
        let lines = critical_lines(3).unwrap();
        let thetas: Vec<Rational> = lines.iter().map(|l| l.theta.clone()).collect();
        assert_eq!(thetas, vec![rat(1, 3), int(1), rat(-1, 3)]);
        assert_eq!(lines[0].direction, rat(-1, 6));
        assert!(critical_lines(2).is_err());
    }

    #[test]
    fn synthetic_beta() {
        let zero_angle = CriticalLine { gamma_power: 0, theta: int(0), direction: int(0) };
        assert!(!beta_unit_modulus_at(&Poly::one(), &int(0), &zero_angle).unwrap());
        assert!(beta_unit_modulus_at(&Poly::zero(), &int(0), &zero_angle).unwrap());
    }

    #[test]
    fn surd_signs() {
        assert_eq!(surd_sign(&int(-3), &int(1), &int(8)), Ordering::Less);
        assert_eq!(surd_sign(&int(-3), &int(1), &int(10)), Ordering::Greater);
        assert_eq!(surd_sign(&int(0), &int(-1), &int(2)), Ordering::Less);
        assert_eq!(surd_sign(&int(1), &int(0), &int(2)), Ordering::Greater);
    }

    #[test]
    fn divergence_examples() {
        assert!(symmetry_divergence(5, &RhoValue::Rational(int(-2))).unwrap());
        assert!(!symmetry_divergence(5, &RhoValue::Rational(int(-5))).unwrap());
        assert!(symmetry_divergence(3, &RhoValue::Rational(int(-2))).unwrap());
        let c = RhoValue::Complex { a: rat(-5, 2), b: rat(3, 4), f: BigInt::one() };
        assert_eq!(c.to_string(), "-5/2 + 3/4*i");
        assert!(matches!(symmetry_divergence(4, &c), Err(Error::ComplexExponent(_))));
    }
}
