use kphoton::asymptotics::*;
use kphoton::poly::{rat, Poly, Sym};
use kphoton::weyl::build_reduced_operator;
use kphoton::Error;

fn levels(k: u32, depth: usize) -> Vec<LevelEquation> {
    substitute_ansatz(&build_reduced_operator(k).unwrap(), k, depth).unwrap()
}

fn reduce(k: u32, p: &Poly) -> Poly {
    QuotientRing::new(k).unwrap().reduce(p)
}

#[test]
fn level_zero_factors_for_all_k() {
    for k in 3..=12 {
        let lv = levels(k, 5);
        let g = Poly::var(Sym::Gamma);
        let sq = (&g.pow(k) + &Poly::one()).pow(2);
        assert_eq!(lv[0].poly, -&(&sq * &Poly::var(Sym::C(0))), "k={k}");
        assert!(reduce(k, &lv[0].poly).is_zero());
    }
}

#[test]
fn level_one_vanishes_on_roots_of_minus_one() {
    for k in 3..=12 {
        let lv = levels(k, 5);
        assert!(reduce(k, &lv[1].poly).is_zero(), "k={k}: {}", reduce(k, &lv[1].poly));
    }
}

#[test]
fn level_three_vanishes_once_beta_is_zero() {
    for k in 5..=12 {
        let lv = levels(k, 5);
        let l3 = lv[3].poly.substitute(Sym::Beta, &Poly::zero());
        assert!(reduce(k, &l3).is_zero(), "k={k}");
    }
}

#[test]
fn tail_coefficients_are_redundant_in_the_exponent_window() {
    // Coefficients of c_j (j >= 1) in levels <= 4 vanish on the solution set.
    for k in 3..=12 {
        let lv = levels(k, 5);
        let branches = solve_levels(&lv, k).unwrap();
        let b = &branches[0];
        for l in &lv[..=4] {
            let reduced = substitute_in_ring(&b.ring, &b.ring.reduce(&l.poly), Sym::Beta, &b.beta);
            let reduced = substitute_in_ring(&b.ring, &reduced, Sym::Rho, &b.rho.value());
            for j in 1..=l.level {
                let sym = Sym::C(j as u16);
                if l.level == b.rho_level + j {
                    continue;
                }
                let parts = reduced.coefficients_in(sym);
                for (e, c) in parts {
                    if e > 0 {
                        let c = substitute_in_ring(&b.ring, &c, Sym::C(0), &Poly::one());
                        assert!(c.is_zero(), "k={k} level {} c{j}: {c}", l.level);
                    }
                }
            }
        }
    }
}

#[test]
fn beta_solutions() {
    let lv = levels(3, 5);
    let branches = solve_levels(&lv, 3).unwrap();
    let ring = &branches[0].ring;
    // β = ±ω/(3γ)
    let g_inv = ring.inverse(&ring.gamma()).unwrap();
    let target = ring.mul(&"1/3*w".parse().unwrap(), &g_inv);
    for b in &branches {
        assert!(b.beta == target || b.beta == -&target, "{}", b.beta);
    }
    let plus = branches.iter().filter(|b| b.beta == target).count();
    assert_eq!(plus, 3);
    for k in 4..=12 {
        for b in solve_levels(&levels(k, 5), k).unwrap() {
            assert!(b.beta.is_zero(), "k={k}");
        }
    }
}

#[test]
fn general_rho_equation_for_k_at_least_five() {
    for k in 5..=12 {
        let branches = solve_levels(&levels(k, 5), k).unwrap();
        assert_eq!(branches.len(), 2 * k as usize);
        let (b1, b0) = rho_quadratic_general(k).unwrap();
        let (plus, minus) = rho_roots_general(k).unwrap();
        for b in &branches {
            let monic = &b.rho.monic;
            assert_eq!(monic.len(), 3);
            assert_eq!(monic[1], Poly::constant(b1.clone()), "k={k}");
            assert_eq!(monic[0], Poly::constant(b0.clone()), "k={k}");
            for p in monic {
                assert!(!p.contains(Sym::Omega) && !p.contains(Sym::Delta) && !p.contains(Sym::Energy));
            }
            let expected = if b.rho_index == 0 { &plus } else { &minus };
            assert_eq!(b.rho.value(), Poly::constant(expected.clone()), "k={k}");
            assert!(b.rho.check(&b.ring));
            assert!(*expected < rat(-1, 2));
        }
        assert_eq!(plus, rat(1 - i64::from(k), 2));
        assert_eq!(minus, rat(5 - 3 * i64::from(k), 2));
    }
}

#[test]
fn quartic_rho_equation() {
    let branches = solve_levels(&levels(4, 5), 4).unwrap();
    assert_eq!(branches.len(), 8);
    let expected: Vec<Poly> = vec!["1/16*w^2 + 21/4".parse().unwrap(), Poly::int(5), Poly::one()];
    for b in &branches {
        assert_eq!(b.rho.monic, expected);
        assert_eq!(b.rho.rational, Poly::constant(rat(-5, 2)));
        assert_eq!(b.rho.radicand, Some("16 - w^2".parse().unwrap()));
        let s = if b.rho_index == 0 { rat(1, 4) } else { rat(-1, 4) };
        assert_eq!(b.rho.surd, Poly::constant(s));
    }
}

#[test]
fn back_substitution_after_tail_recursion() {
    for k in [3u32, 5, 6, 7] {
        let n_max = 3;
        let depth = 5 + n_max;
        let lv = levels(k, depth);
        for b in solve_levels(&lv[..=5], k).unwrap() {
            let full = c_recursion(&b, &lv, n_max).unwrap();
            assert_eq!(full.c.len(), n_max + 1);
            assert_eq!(full.c[0], Poly::one());
            let upto = full.rho_level + n_max;
            for l in &lv[..=upto] {
                assert!(full.residual(l).is_zero(), "k={k} level {}", l.level);
            }
        }
    }
}

#[test]
fn resonance_on_the_upper_branch() {
    // On ρ_+ the tail index n = k − 2 is resonant. For k = 5 the level is
    // consistent and c_3 is free; for k = 6 it is not and a logarithmic term
    // would be required.
    let upper = |k: u32, lv: &[LevelEquation]| {
        solve_levels(lv, k).unwrap().into_iter().find(|b| b.rho_index == 0).unwrap()
    };
    let lv = levels(5, 9);
    let full = c_recursion(&upper(5, &lv), &lv, 4).unwrap();
    assert!(full.c[3].is_zero());
    for l in &lv[..=8] {
        assert!(full.residual(l).is_zero());
    }
    let lv = levels(6, 10);
    match c_recursion(&upper(6, &lv), &lv, 5) {
        Err(Error::UnsolvableLevel { level, residual, .. }) => {
            assert_eq!(level, 8);
            assert_eq!(residual, "w^2*g^2");
        }
        other => panic!("expected a resonance failure, got {other:?}"),
    }
    let lower = solve_levels(&lv, 6).unwrap().into_iter().find(|b| b.rho_index == 1).unwrap();
    assert!(c_recursion(&lower, &lv, 5).is_ok());
}

#[test]
fn symbolic_quartic_tail_needs_a_numeric_omega() {
    let lv = levels(4, 6);
    let b = &solve_levels(&lv, 4).unwrap()[0];
    assert!(matches!(c_recursion(b, &lv, 1), Err(Error::DivisionByNonUnit(_))));
}

#[test]
fn k_two_is_out_of_scope() {
    let lv = substitute_ansatz(&build_reduced_operator(2).unwrap(), 2, 5).unwrap();
    assert!(matches!(solve_levels(&lv, 2), Err(Error::OutOfScope(_))));
    assert_eq!(lv.len(), 6);
}
