use std::fmt::Write as _;

use kphoton::asymptotics::{
    assemble_final1, c0_closed, c_recursion, crho_closed, crho_from_oracle, gf_coefficient, solve_levels,
    substitute_ansatz, CrhoCoefficients, ExponentBranch, MIN_DEPTH,
};
use kphoton::fock::{jck_exact_spectrum, ModelParams};
use kphoton::poly::{fmt_rational, Rational};
use kphoton::verdict::{Verdict, VerdictReport};
use kphoton::weyl::{a_table, build_reduced_operator, elimination_operator};
use kphoton::Error;
use serde_json::{json, Value};

use crate::{Failure, Format};

pub fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json value serializes");
    s.push('\n');
    s
}

pub fn coeffs(k: u32, as_json: bool) -> Result<String, Failure> {
    if k == 0 {
        return Err(crate::usage("--k must be at least 1"));
    }
    let table: Vec<String> = a_table(k).iter().skip(1).map(fmt_rational).collect();
    if as_json {
        return Ok(pretty(&json!({ "k": k, "a": table })));
    }
    let mut s = String::from("j a_j\n");
    for (j, a) in table.iter().enumerate() {
        let _ = writeln!(s, "{} {a}", j + 1);
    }
    Ok(s)
}

pub fn ode(k: u32, elimination: bool, as_json: bool) -> Result<String, Failure> {
    let op = if elimination { elimination_operator(k)? } else { build_reduced_operator(k)? };
    if as_json {
        let terms: Vec<Value> = op
            .terms()
            .map(|(&(i, j), c)| json!({ "z": i, "d": j, "coeff": c.to_poly().to_string() }))
            .collect();
        let variant = if elimination { "elimination" } else { "published" };
        return Ok(pretty(&json!({ "k": k, "variant": variant, "operator": op.to_string(), "terms": terms })));
    }
    Ok(format!("{op}\n"))
}

fn branches(k: u32, depth: usize) -> Result<Vec<ExponentBranch>, Error> {
    if k == 2 {
        return Err(Error::OutOfScope(
            "k = 2 has no exponents of this kind; see `rabi sweep --k 2` for the collapse at g = ω/2".into(),
        ));
    }
    let op = build_reduced_operator(k)?;
    let levels = substitute_ansatz(&op, k, depth.max(MIN_DEPTH))?;
    let base = solve_levels(&levels[..=MIN_DEPTH], k)?;
    if depth <= MIN_DEPTH {
        return Ok(base);
    }
    base.iter()
        .map(|b| c_recursion(b, &levels, depth - b.rho_level))
        .collect()
}

pub fn exponents(k: u32, depth: usize, as_json: bool) -> Result<String, Failure> {
    if depth < MIN_DEPTH {
        return Err(crate::usage(format!("--depth must be at least {MIN_DEPTH}")));
    }
    let bs = branches(k, depth)?;
    if as_json {
        let v = serde_json::to_value(&bs).expect("branches serialize");
        return Ok(pretty(&json!({ "k": k, "depth": depth, "branches": v })));
    }
    let mut s = format!("k = {k}, {} branches (each γ root of multiplicity 2)\n", bs.len());
    s.push_str("gamma\tbeta_index\trho_index\tbeta\trho\n");
    for b in &bs {
        let _ = writeln!(
            s,
            "exp(i*pi*{}/{k})\t{}\t{}\t{}\t{}",
            b.gamma_power, b.beta_index, b.rho_index, b.beta, b.rho
        );
    }
    if let Some(b) = bs.first() {
        let monic: Vec<String> = b.rho.monic.iter().map(|p| format!("({p})")).collect();
        let _ = writeln!(s, "rho equation (lowest first): {}", monic.join(", "));
        if b.c.len() > 1 {
            for (n, c) in b.c.iter().enumerate() {
                let _ = writeln!(s, "c{n} = {c}");
            }
        }
    }
    Ok(s)
}

pub fn verdict(report: &VerdictReport, as_json: bool) -> String {
    if as_json {
        return pretty(&report.to_json());
    }
    let k = report.k;
    let name = match report.verdict {
        Verdict::SelfAdjoint => "SelfAdjoint",
        Verdict::NotSelfAdjoint => "NotSelfAdjoint",
        Verdict::OutOfScope => "OutOfScope",
    };
    let mut s = format!(
        "k = {k}, omega = {}, delta = {}\nverdict: {name}\nreason: {}\n",
        fmt_rational(&report.omega),
        fmt_rational(&report.delta),
        report.reason
    );
    if !report.branches.is_empty() {
        s.push_str("gamma\tbeta\trho\tnormalizable\tsymmetry_divergent\tbeta_unit_modulus\n");
        for b in &report.branches {
            let div = b.symmetry_divergent.map_or("n/a".to_string(), |d| d.to_string());
            let _ = writeln!(
                s,
                "exp(i*pi*{}/{k})\t{}\t{}\t{}\t{div}\t{}",
                b.branch.gamma_power,
                b.branch.beta,
                b.normalizability.rho,
                b.normalizability.normalizable,
                b.normalizability.beta_unit_modulus
            );
        }
        let _ = writeln!(s, "trace: {}", report.trace_ref());
    }
    s
}

fn crho_json(c: &CrhoCoefficients) -> Value {
    json!({
        "c2k_rho2": fmt_rational(&c.c2k_rho2),
        "c2k_rho": fmt_rational(&c.c2k_rho),
        "ck_rho2": fmt_rational(&c.ck_rho2),
        "ck_rho": fmt_rational(&c.ck_rho),
    })
}

/// Returns the rendered table and whether every cross-check agreed.
pub fn gf(k: u32, as_json: bool) -> Result<(String, bool), Failure> {
    if !(5..=12).contains(&k) {
        return Err(crate::usage("gf needs 5 <= k <= 12"));
    }
    let c0: Vec<(u32, Rational, Rational)> = [k, 2 * k]
        .into_iter()
        .map(|m| Ok((m, gf_coefficient(m)?, c0_closed(m))))
        .collect::<Result<_, Error>>()?;
    let closed = crho_closed(k);
    let oracle = crho_from_oracle(k)?;
    let (b1, b0) = assemble_final1(k, &closed)?;
    let op = build_reduced_operator(k)?;
    let levels = substitute_ansatz(&op, k, MIN_DEPTH)?;
    let pipeline = &solve_levels(&levels, k)?[0].rho.monic;
    let (p1, p0) = (pipeline[1].as_constant(), pipeline[0].as_constant());
    let agree = c0.iter().all(|(_, g, c)| g == c)
        && closed == oracle
        && p1.as_ref() == Some(&b1)
        && p0.as_ref() == Some(&b0);
    if as_json {
        let c0v: Vec<Value> = c0
            .iter()
            .map(|(m, g, c)| json!({ "m": m, "generating_function": fmt_rational(g), "closed": fmt_rational(c) }))
            .collect();
        let body = json!({
            "k": k,
            "c0": c0v,
            "crho_closed": crho_json(&closed),
            "crho_oracle": crho_json(&oracle),
            "assembled": [fmt_rational(&b1), fmt_rational(&b0)],
            "pipeline": [pipeline[1].to_string(), pipeline[0].to_string()],
            "agree": agree,
        });
        return Ok((pretty(&body), agree));
    }
    let mut s = format!("k = {k}\nquantity\tclosed\tindependent\n");
    for (m, g, c) in &c0 {
        let _ = writeln!(s, "C0({m})\t{}\t{}", fmt_rational(c), fmt_rational(g));
    }
    let rows = [
        ("C_rho2(2k)", &closed.c2k_rho2, &oracle.c2k_rho2),
        ("C_rho(2k)", &closed.c2k_rho, &oracle.c2k_rho),
        ("C_rho2(k)", &closed.ck_rho2, &oracle.ck_rho2),
        ("C_rho(k)", &closed.ck_rho, &oracle.ck_rho),
    ];
    for (name, a, b) in rows {
        let _ = writeln!(s, "{name}\t{}\t{}", fmt_rational(a), fmt_rational(b));
    }
    let _ = writeln!(s, "rho^2 + ({})*rho + ({})\tassembled", fmt_rational(&b1), fmt_rational(&b0));
    let _ = writeln!(s, "rho^2 + ({})*rho + ({})\tpipeline", pipeline[1], pipeline[0]);
    let _ = writeln!(s, "agree: {agree}");
    Ok((s, agree))
}

pub fn jc_exact(params: &ModelParams, n_max: usize, format: Format) -> Result<String, Failure> {
    let spectrum = jck_exact_spectrum(params, n_max)?;
    Ok(match format {
        Format::Json => pretty(&json!({ "params": params, "n_max": n_max, "eigenvalues": spectrum })),
        Format::Csv => {
            let mut s = String::from("k,g,omega,delta,n_max,index,eigenvalue\n");
            for (i, v) in spectrum.iter().enumerate() {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{n_max},{i},{v:.16e}",
                    params.k, params.g, params.omega, params.delta
                );
            }
            s
        }
        Format::Text => spectrum.iter().map(|v| format!("{v:.16e}\n")).collect(),
    })
}
