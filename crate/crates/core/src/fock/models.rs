//! Truncated Hamiltonians in the interleaved basis `|n, s⟩ ↦ 2n + s`, with
//! `s = 0` for spin down (`σ_z = −1`) and `s = 1` for spin up.

use serde::Serialize;

use super::band::BandedSymmetricMatrix;
use crate::error::{Error, Result};

pub const DOWN: usize = 0;
pub const UP: usize = 1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ModelParams {
    pub k: u32,
    pub g: f64,
    pub omega: f64,
    pub delta: f64,
}

impl ModelParams {
    pub fn new(k: u32, g: f64, omega: f64, delta: f64) -> Result<Self> {
        let p = ModelParams { k, g, omega, delta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidInput("k must be at least 1".into()));
        }
        if !(self.omega.is_finite() && self.omega > 0.0) {
            return Err(Error::InvalidInput(format!("ω must be finite and positive, got {}", self.omega)));
        }
        if !self.g.is_finite() || self.g < 0.0 {
            return Err(Error::InvalidInput(format!("g must be finite and non-negative, got {}", self.g)));
        }
        if !self.delta.is_finite() {
            return Err(Error::InvalidInput("Δ must be finite".into()));
        }
        Ok(())
    }
}

pub fn index(n: usize, s: usize) -> usize {
    2 * n + s
}

/// `⟨n − k| â^k |n⟩ = √(n (n−1) ⋯ (n−k+1))`, as a running product.
pub fn ladder_weight(n: usize, k: u32) -> f64 {
    (0..k as usize).map(|i| ((n - i) as f64).sqrt()).product()
}

fn check(params: &ModelParams, n_fock: usize) -> Result<()> {
    params.validate()?;
    if n_fock <= params.k as usize {
        return Err(Error::InvalidInput(format!(
            "truncation N = {n_fock} must exceed k = {}",
            params.k
        )));
    }
    Ok(())
}

fn free_part(params: &ModelParams, n_fock: usize) -> BandedSymmetricMatrix {
    let mut m = BandedSymmetricMatrix::zeros(2 * n_fock, 2 * params.k as usize + 1);
    for n in 0..n_fock {
        let e = params.omega * n as f64;
        m.set(index(n, DOWN), index(n, DOWN), e - params.delta);
        m.set(index(n, UP), index(n, UP), e + params.delta);
    }
    m
}

/// `ω â†â + g(â^k + â†^k)σ_x + Δσ_z` on the first `N` Fock states.
pub fn build_hkp(params: &ModelParams, n_fock: usize) -> Result<BandedSymmetricMatrix> {
    check(params, n_fock)?;
    let k = params.k as usize;
    let mut m = free_part(params, n_fock);
    for n in 0..n_fock - k {
        let w = params.g * ladder_weight(n + k, params.k);
        m.set(index(n, DOWN), index(n + k, UP), w);
        m.set(index(n, UP), index(n + k, DOWN), w);
    }
    Ok(m)
}

/// `ω â†â + g(â^k σ⁺ + â†^k σ⁻) + Δσ_z`: only `|n+k,↓⟩ ↔ |n,↑⟩` couple.
pub fn build_jck(params: &ModelParams, n_fock: usize) -> Result<BandedSymmetricMatrix> {
    check(params, n_fock)?;
    let k = params.k as usize;
    let mut m = free_part(params, n_fock);
    for n in 0..n_fock - k {
        m.set(index(n + k, DOWN), index(n, UP), params.g * ladder_weight(n + k, params.k));
    }
    Ok(m)
}

/// The 2×2 block of the JC model on `{|n+k,↓⟩, |n,↑⟩}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JcBlock {
    pub n: usize,
    /// `[[a, c], [c, b]]`
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl JcBlock {
    pub fn new(params: &ModelParams, n: usize) -> Self {
        let k = params.k as usize;
        JcBlock {
            n,
            a: params.omega * (n + k) as f64 - params.delta,
            b: params.omega * n as f64 + params.delta,
            c: params.g * ladder_weight(n + k, params.k),
        }
    }

    /// `mean ∓ √((gap/2)² + c²)`, ascending.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let mean = 0.5 * (self.a + self.b);
        let r = (0.5 * (self.a - self.b)).hypot(self.c);
        [mean - r, mean + r]
    }
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

/// Blocks `0..=n_max` plus the `k` uncoupled levels `|n,↓⟩`, `n < k`.
pub fn jck_exact_spectrum(params: &ModelParams, n_max: usize) -> Result<Vec<f64>> {
    params.validate()?;
    let mut out: Vec<f64> = (0..params.k as usize)
        .map(|n| params.omega * n as f64 - params.delta)
        .collect();
    for n in 0..=n_max {
        out.extend(JcBlock::new(params, n).eigenvalues());
    }
    Ok(sorted(out))
}

/// Exact spectrum of [`build_jck`] at truncation `N`: the complete blocks
/// `n ≤ N−1−k`, the `k` low spin-down levels and the `k` spin-up levels
/// `|n,↑⟩`, `n ≥ N−k`, whose partners fall outside the truncation.
pub fn jck_truncated_spectrum(params: &ModelParams, n_fock: usize) -> Result<Vec<f64>> {
    check(params, n_fock)?;
    let k = params.k as usize;
    let mut out = jck_exact_spectrum(params, n_fock - 1 - k)?;
    out.extend((n_fock - k..n_fock).map(|n| params.omega * n as f64 + params.delta));
    Ok(sorted(out))
}

/// `E_n = ωn − g²/ω`, each twice; the first `m` values.
pub fn displaced_oscillator_oracle(g: f64, omega: f64, m: usize) -> Result<Vec<f64>> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::InvalidInput("ω must be positive".into()));
    }
    let shift = g * g / omega;
    Ok((0..m).map(|i| omega * (i / 2) as f64 - shift).collect())
}
