//! Spectra across truncation sizes and their qualitative classification.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::eigen::lowest_eigenvalues;
use super::models::{build_hkp, ModelParams};
use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_M: usize = 10;
/// Shrink factor of the low-level spacing that counts as accumulation.
pub const COLLAPSE_FACTOR: f64 = 10.0;
pub const CSV_HEADER: &str = "k,g,omega,delta,N,index,eigenvalue";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Classification {
    Convergent,
    Collapse,
    Divergent,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumSweep {
    pub params: ModelParams,
    pub n_list: Vec<usize>,
    /// Lowest eigenvalues per truncation, ascending.
    pub spectra: Vec<Vec<f64>>,
    pub tol: f64,
    pub classification: Classification,
}

/// `N, 2N, 4N, …`, `count` entries.
pub fn geometric_grid(start: usize, count: usize) -> Vec<usize> {
    (0..count).map(|i| start << i).collect()
}

/// Lowest `m` eigenvalues of [`build_hkp`] for each `N`, computed in parallel
/// and kept in the order of `n_list`.
pub fn convergence_sweep(params: &ModelParams, n_list: &[usize], m: usize, tol: f64) -> Result<SpectrumSweep> {
    params.validate()?;
    if n_list.len() < 3 {
        return Err(Error::InvalidInput("a sweep needs at least three truncation sizes".into()));
    }
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput("truncation sizes must be strictly increasing".into()));
    }
    if m == 0 || m > 2 * n_list[0] {
        return Err(Error::InvalidInput(format!("m = {m} out of range for N = {}", n_list[0])));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    let spectra = n_list
        .par_iter()
        .map(|&n| build_hkp(params, n).and_then(|h| lowest_eigenvalues(&h, m)))
        .collect::<Result<Vec<_>>>()?;
    let classification = classify_convergence(&spectra, tol);
    Ok(SpectrumSweep { params: *params, n_list: n_list.to_vec(), spectra, tol, classification })
}

/// Mean spacing among the given lowest eigenvalues.
fn spacing(levels: &[f64]) -> f64 {
    match levels {
        [first, .., last] => (last - first) / (levels.len() - 1) as f64,
        _ => f64::NAN,
    }
}

/// Classifies a sequence of low spectra (one per truncation, in increasing
/// `N`). Thresholds are choices of this tool, not physical constants.
///
/// - Collapse: the mean spacing of the lowest levels shrinks by at least
///   [`COLLAPSE_FACTOR`] while the gaps `|E_min(N_{i+1}) − E_min(N_i)|` do
///   not grow (up to rounding).
/// - Convergent: the gaps never grow and the last one is below `tol`.
/// - Divergent: `|E_min|` increases at every step and the gaps do not shrink.
pub fn classify_convergence(spectra: &[Vec<f64>], tol: f64) -> Classification {
    if spectra.len() < 3 || spectra.iter().any(|s| s.is_empty()) {
        return Classification::Inconclusive;
    }
    let e: Vec<f64> = spectra.iter().map(|s| s[0]).collect();
    let scale = e.iter().fold(1.0f64, |a, x| a.max(x.abs()));
    let floor = 1e3 * f64::EPSILON * scale;
    let gaps: Vec<f64> = e.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let non_growing = gaps.windows(2).all(|w| w[1] <= w[0].max(floor));
    let last_gap = *gaps.last().unwrap();
    let first_spacing = spacing(&spectra[0]);
    let last_spacing = spacing(spectra.last().unwrap());
    if first_spacing > 0.0 && last_spacing * COLLAPSE_FACTOR <= first_spacing && non_growing {
        return Classification::Collapse;
    }
    if non_growing && last_gap < tol {
        return Classification::Convergent;
    }
    let magnitude_grows = e.windows(2).all(|w| w[1].abs() > w[0].abs());
    if magnitude_grows && last_gap >= gaps[0] {
        return Classification::Divergent;
    }
    Classification::Inconclusive
}

impl SpectrumSweep {
    pub fn e_min_series(&self) -> Vec<f64> {
        self.spectra.iter().map(|s| s[0]).collect()
    }

    /// One row per eigenvalue, `{:.16e}` (17 significant digits).
    pub fn to_csv(&self) -> String {
        let p = &self.params;
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for (n, spectrum) in self.n_list.iter().zip(&self.spectra) {
            for (i, v) in spectrum.iter().enumerate() {
                let _ = writeln!(out, "{},{},{},{},{n},{i},{v:.16e}", p.k, p.g, p.omega, p.delta);
            }
        }
        out
    }

    pub fn summary_json(&self) -> Value {
        json!({
            "params": self.params,
            "N_list": self.n_list,
            "classification": self.classification,
            "E_min_series": self.e_min_series(),
            "m": self.spectra[0].len(),
            "thresholds": {
                "tol": self.tol,
                "collapse_factor": COLLAPSE_FACTOR,
                "note": "classification thresholds are tool defaults, not physical constants",
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(f: impl Fn(f64) -> f64) -> Vec<Vec<f64>> {
        [10.0, 20.0, 40.0, 80.0].iter().map(|&n| vec![f(n), f(n) + 1.0]).collect()
    }

    #[test]
    fn synthetic_sequences() {
        assert_eq!(classify_convergence(&series(|n| -1.0 - 2f64.powf(-n)), 1e-6), Classification::Convergent);
        assert_eq!(classify_convergence(&series(|n| -n), 1e-6), Classification::Divergent);
        assert_eq!(classify_convergence(&series(|_| 0.0)[..2], 1e-6), Classification::Inconclusive);
    }

    #[test]
    fn accumulating_levels() {
        let spectra: Vec<Vec<f64>> = [1.0, 0.3, 0.05]
            .iter()
            .map(|&h| (0..5).map(|i| -2.0 + h * i as f64).collect())
            .collect();
        assert_eq!(classify_convergence(&spectra, 1e-6), Classification::Collapse);
    }

    #[test]
    fn grid() {
        assert_eq!(geometric_grid(100, 4), vec![100, 200, 400, 800]);
    }
}
