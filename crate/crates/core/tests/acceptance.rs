//! Acceptance criteria. Each prints one `[PASS]` or `[FAIL]` line with its
//! wall time; the test fails if any criterion does.
//!
//! Run with `cargo test -p kphoton-core --test acceptance -- --nocapture`.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use kphoton::asymptotics::*;
use kphoton::fock::*;
use kphoton::poly::{int, rat, Poly, Rational, Sym};
use kphoton::verdict::{symmetry_divergence, verdict, RhoValue, Verdict};
use kphoton::weyl::{a1_closed, a2_closed, a_coeff, build_reduced_operator, coupling_square, op_mul, OperatorPoly};

type Check = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn p(s: &str) -> Poly {
    s.parse().expect("fixture parses")
}

fn levels(k: u32) -> Vec<LevelEquation> {
    substitute_ansatz(&build_reduced_operator(k).unwrap(), k, MIN_DEPTH).unwrap()
}

fn operator_matches(op: &OperatorPoly, expected: &[(u32, u32, &str)]) -> Check {
    let count = op.terms().count();
    ensure(count == expected.len(), || format!("{count} terms, expected {}", expected.len()))?;
    for &(i, j, c) in expected {
        let got = op.coeff(i, j).to_poly();
        ensure(got == p(c), || format!("z^{i} D^{j}: got {got}, expected {c}"))?;
    }
    Ok(())
}

fn normal_ordering_fixtures() -> Check {
    let op3 = build_reduced_operator(3).map_err(|e| e.to_string())?;
    operator_matches(
        &op3,
        &[
            (0, 6, "-1"),
            (3, 3, "-2"),
            (6, 0, "-1"),
            (2, 2, "w^2 - 9"),
            (1, 1, "w^2 - 2*w*E - 18"),
            (2, 0, "3*w"),
            (0, 0, "E^2 - d^2 - 6"),
        ],
    )?;
    let op4 = build_reduced_operator(4).map_err(|e| e.to_string())?;
    operator_matches(
        &op4,
        &[
            (0, 8, "-1"),
            (4, 4, "-2"),
            (8, 0, "-1"),
            (3, 3, "-16"),
            (2, 2, "w^2 - 72"),
            (1, 1, "w^2 - 2*w*E - 96"),
            (3, 0, "4*w"),
            (0, 0, "E^2 - d^2 - 24"),
        ],
    )?;
    // The square is a genuine product in the Weyl algebra.
    let b3 = &OperatorPoly::z(3) + &OperatorPoly::d(3);
    ensure(op_mul(&b3, &b3) == coupling_square(3), || "coupling square".into())?;
    let table = |k: u32| (1..=k).map(|j| a_coeff(j, k)).collect::<Vec<_>>();
    ensure(table(3) == [int(9), int(18), int(6)], || format!("a(3) = {:?}", table(3)))?;
    ensure(table(4) == [int(16), int(72), int(96), int(24)], || format!("a(4) = {:?}", table(4)))?;
    for n in 1..=20 {
        ensure(a_coeff(1, n) == a1_closed(n) && a_coeff(2, n) == a2_closed(n), || format!("closed forms at n={n}"))?;
        let n = i64::from(n);
        ensure(a_coeff(1, n as u32) == int(n * n), || "a1 = n^2".into())?;
        ensure(a_coeff(2, n as u32) == rat(n * n * (n - 1) * (n - 1), 2), || "a2".into())?;
    }
    Ok(())
}

fn cubic_exponents() -> Check {
    let lv = levels(3);
    let g3 = &Poly::var_pow(Sym::Gamma, 3) + &Poly::one();
    ensure(lv[0].poly == -&(&g3.pow(2) * &Poly::var(Sym::C(0))), || format!("level 0 = {}", lv[0].poly))?;
    let branches = solve_levels(&lv, 3).map_err(|e| e.to_string())?;
    ensure(branches.len() == 6, || format!("{} branches", branches.len()))?;
    for power in [1, 3, 5] {
        let n = branches.iter().filter(|b| b.gamma_power == power).count();
        ensure(n == 2, || format!("γ root {power} carries {n} branches"))?;
    }
    let ring = &branches[0].ring;
    let beta = ring.div(&p("1/3*w"), &ring.gamma()).map_err(|e| e.to_string())?;
    for b in &branches {
        ensure(b.gamma_multiplicity == 2, || "multiplicity".into())?;
        ensure(b.beta == beta || b.beta == -&beta, || format!("β = {}", b.beta))?;
        ensure(b.rho.value() == Poly::int(-2), || format!("ρ = {}", b.rho))?;
        for sym in [Sym::Delta, Sym::Energy] {
            ensure(!b.beta.contains(sym) && !b.rho.value().contains(sym), || "parameter leak".into())?;
        }
    }
    // Δ stays a symbol in the operator the levels came from.
    let op = build_reduced_operator(3).map_err(|e| e.to_string())?;
    ensure(op.coeff(0, 0).to_poly().contains(Sym::Delta), || "Δ not symbolic".into())?;
    Ok(())
}

fn quartic_exponents() -> Check {
    let branches = solve_levels(&levels(4), 4).map_err(|e| e.to_string())?;
    ensure(branches.len() == 8, || format!("{} branches", branches.len()))?;
    let monic = vec![p("1/16*w^2 + 21/4"), Poly::int(5), Poly::one()];
    for b in &branches {
        ensure(b.beta.is_zero(), || format!("β = {}", b.beta))?;
        ensure(b.rho.monic == monic, || format!("ρ equation {:?}", b.rho.monic))?;
        ensure(b.rho.rational == Poly::constant(rat(-5, 2)), || format!("ρ = {}", b.rho))?;
        ensure(b.rho.radicand == Some(p("16 - w^2")), || format!("radicand {:?}", b.rho.radicand))?;
        let s = if b.rho_index == 0 { rat(1, 4) } else { rat(-1, 4) };
        ensure(b.rho.surd == Poly::constant(s), || format!("ρ = {}", b.rho))?;
        ensure(b.rho.check(&b.ring), || "root does not satisfy its equation".into())?;
    }
    Ok(())
}

fn general_exponents() -> Check {
    for k in 5..=12u32 {
        let lv = levels(k);
        let branches = solve_levels(&lv, k).map_err(|e| e.to_string())?;
        ensure(branches.len() == 2 * k as usize, || format!("k={k}: {} branches", branches.len()))?;
        let ring = QuotientRing::new(k).unwrap();
        ensure(ring.reduce(&lv[1].poly).is_zero(), || format!("k={k}: level 1 = {}", ring.reduce(&lv[1].poly)))?;
        let l3 = ring.reduce(&lv[3].poly.substitute(Sym::Beta, &Poly::zero()));
        ensure(l3.is_zero(), || format!("k={k}: level 3 = {l3}"))?;
        let kk = i64::from(k);
        let b1 = int(2 * kk - 3);
        let b0 = rat(3 * kk * kk, 4) - int(2 * kk) + rat(5, 4);
        let (plus, minus) = (rat(1 - kk, 2), rat(5 - 3 * kk, 2));
        for root in [&plus, &minus] {
            ensure((root * root + &b1 * root + &b0) == int(0), || format!("k={k}: root {root}"))?;
        }
        for b in &branches {
            ensure(b.beta.is_zero(), || format!("k={k}: β = {}", b.beta))?;
            let expected = vec![Poly::constant(b0.clone()), Poly::constant(b1.clone()), Poly::one()];
            ensure(b.rho.monic == expected, || format!("k={k}: ρ equation {:?}", b.rho.monic))?;
            let want = if b.rho_index == 0 { &plus } else { &minus };
            ensure(b.rho.value() == Poly::constant(want.clone()), || format!("k={k}: ρ = {}", b.rho))?;
        }
    }
    Ok(())
}

fn generating_function() -> Check {
    for m in 4..=24u32 {
        let mm = i64::from(m);
        let direct = rat(mm * (mm - 1) * (mm - 2) * (mm - 3), 8);
        let gf = gf_coefficient(m).map_err(|e| e.to_string())?;
        ensure(gf == c0_closed(m) && gf == direct, || format!("m={m}: {gf} vs {direct}"))?;
    }
    for k in 5..=10u32 {
        let oracle = crho_from_oracle(k).map_err(|e| e.to_string())?;
        ensure(oracle == crho_closed(k), || format!("k={k}: {oracle:?} vs {:?}", crho_closed(k)))?;
    }
    for k in 5..=12u32 {
        let assembled = assemble_final1(k, &crho_closed(k)).map_err(|e| e.to_string())?;
        let general = rho_quadratic_general(k).map_err(|e| e.to_string())?;
        ensure(assembled == general, || format!("k={k}: {assembled:?} vs {general:?}"))?;
        let pipeline = &solve_levels(&levels(k), k).map_err(|e| e.to_string())?[0].rho.monic;
        ensure(
            pipeline[1] == Poly::constant(assembled.0.clone()) && pipeline[0] == Poly::constant(assembled.1.clone()),
            || format!("k={k}: pipeline disagrees"),
        )?;
    }
    Ok(())
}

fn verdicts() -> Check {
    let omegas: [Rational; 4] = [rat(1, 2), int(1), int(2), rat(7, 2)];
    for k in 3..=12u32 {
        for omega in &omegas {
            let r = verdict(k, omega, &rat(1, 3)).map_err(|e| e.to_string())?;
            ensure(r.verdict == Verdict::NotSelfAdjoint, || format!("k={k} ω={omega}: {:?}", r.verdict))?;
            ensure(r.energy_free, || format!("k={k}: E in an exponent"))?;
            for b in &r.branches {
                let br = &b.branch;
                let exps = [&br.beta, &br.rho.rational, &br.rho.surd];
                let eqs = br.rho.monic.iter().chain(br.rho.radicand.iter());
                ensure(exps.into_iter().chain(eqs).all(|q| !q.contains(Sym::Energy)), || format!("k={k}: E present"))?;
                ensure(b.normalizability.normalizable, || format!("k={k} ω={omega}: not normalizable"))?;
                let divergent = symmetry_divergence(k, &b.normalizability.rho).ok();
                if k >= 5 {
                    ensure(divergent == Some(br.rho_index == 0), || format!("k={k}: divergence on ρ index {}", br.rho_index))?;
                }
                if k == 3 {
                    ensure(b.normalizability.rho == RhoValue::Rational(int(-2)), || "k=3 ρ".into())?;
                    ensure(divergent == Some(true), || "k=3 boundary case".into())?;
                }
            }
        }
    }
    Ok(())
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs().max(1.0)
}

fn numerics_oracles() -> Check {
    for k in [2u32, 3] {
        let params = ModelParams::new(k, 0.1, 1.0, 0.2).map_err(|e| e.to_string())?;
        let n = 400;
        let h = build_jck(&params, n).map_err(|e| e.to_string())?;
        let ours = lowest_eigenvalues(&h, 2 * n).map_err(|e| e.to_string())?;
        let exact = jck_truncated_spectrum(&params, n).map_err(|e| e.to_string())?;
        for (i, (x, y)) in ours.iter().zip(&exact).enumerate() {
            ensure(close(*x, *y, 1e-10), || format!("JC k={k} level {i}: {x} vs {y}"))?;
        }
    }
    let params = ModelParams::new(1, 1.0, 1.0, 0.0).map_err(|e| e.to_string())?;
    let e0 = lowest_eigenvalues(&build_hkp(&params, 200).map_err(|e| e.to_string())?, 1).map_err(|e| e.to_string())?[0];
    let want = displaced_oscillator_oracle(1.0, 1.0, 1).map_err(|e| e.to_string())?[0];
    ensure((e0 - want).abs() < 1e-8 && want == -1.0, || format!("k=1 ground {e0} vs {want}"))
}

fn contrast_diagnostics() -> Check {
    let grid = [100, 200, 400, 800];
    let run = |k: u32, g: f64, delta: f64| -> Result<SpectrumSweep, String> {
        let params = ModelParams::new(k, g, 1.0, delta).map_err(|e| e.to_string())?;
        convergence_sweep(&params, &grid, DEFAULT_M, 1e-6).map_err(|e| e.to_string())
    };
    let one = run(1, 0.3, 0.2)?;
    ensure(one.classification == Classification::Convergent, || format!("k=1: {:?}", one.classification))?;
    let three = run(3, 0.3, 0.2)?;
    ensure(three.classification != Classification::Convergent, || "k=3 converged".into())?;
    let below = run(2, 0.4, 0.2)?;
    let above = run(2, 0.6, 0.2)?;
    ensure(above.classification != Classification::Convergent, || "k=2 above g_c converged".into())?;
    ensure(below.classification != above.classification, || {
        format!("k=2: {:?} on both sides of g_c", below.classification)
    })?;
    println!(
        "       k=1 {:?}, k=3 {:?} (E_min {:?}), k=2 g=0.4 {:?}, g=0.6 {:?} (E_min {:?})",
        one.classification,
        three.classification,
        three.e_min_series(),
        below.classification,
        above.classification,
        above.e_min_series()
    );
    Ok(())
}

#[test]
fn acceptance() {
    type Criterion = (&'static str, Duration, fn() -> Check);
    let criteria: [Criterion; 8] = [
        ("normal-ordering fixtures", Duration::from_secs(1), normal_ordering_fixtures),
        ("exponent pipeline, k=3", Duration::from_secs(10), cubic_exponents),
        ("exponent pipeline, k=4", Duration::from_secs(10), quartic_exponents),
        ("exponent pipeline, 5 <= k <= 12", Duration::from_secs(120), general_exponents),
        ("generating-function combinatorics", Duration::from_secs(60), generating_function),
        ("verdict over k and omega", Duration::from_secs(120), verdicts),
        ("numerics oracles", Duration::from_secs(60), numerics_oracles),
        ("contrast diagnostics", Duration::from_secs(300), contrast_diagnostics),
    ];
    let mut failed = Vec::new();
    println!();
    for (i, (name, limit, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|()| {
            ensure(elapsed <= *limit, || format!("took {elapsed:.2?}, limit {limit:?}"))
        });
        match outcome {
            Ok(()) => println!("[PASS] {} {name} ({elapsed:.2?})", i + 1),
            Err(why) => {
                println!("[FAIL] {} {name} ({elapsed:.2?}): {why}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
