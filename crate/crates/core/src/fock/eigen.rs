//! Lowest eigenvalues of a banded symmetric matrix: Givens band reduction to
//! tridiagonal form (bulge chasing, `O(n²b)`), then Sturm bisection.

use super::band::BandedSymmetricMatrix;
use crate::error::{Error, Result};

/// Bisection steps per eigenvalue. Halving a finite `f64` interval reaches
/// adjacent floats well within this many steps.
const MAX_BISECTIONS: usize = 2200;

/// Lower band with room for one bulge: `(i, i − d)` at `i * (w + 1) + d`.
struct Work {
    n: usize,
    w: usize,
    a: Vec<f64>,
}

impl Work {
    fn from(m: &BandedSymmetricMatrix, b: usize) -> Self {
        let n = m.dim();
        let w = b + 1;
        let mut a = vec![0.0; n * (w + 1)];
        for i in 0..n {
            for d in 0..=b.min(i) {
                a[i * (w + 1) + d] = m.get(i, i - d);
            }
        }
        Work { n, w, a }
    }

    fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        if i - j > self.w {
            0.0
        } else {
            self.a[i * (self.w + 1) + i - j]
        }
    }

    fn set(&mut self, i: usize, j: usize, v: f64) {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        debug_assert!(i - j <= self.w);
        self.a[i * (self.w + 1) + i - j] = v;
    }

    /// Similarity `GᵀAG` in the plane `(p, p + 1)` with `c = cos`, `s = sin`.
    fn rotate(&mut self, p: usize, c: f64, s: f64) {
        let q = p + 1;
        let lo = p.saturating_sub(self.w);
        let hi = (q + self.w).min(self.n - 1);
        for k in lo..=hi {
            if k == p || k == q {
                continue;
            }
            let (x, y) = (self.get(p, k), self.get(q, k));
            if x == 0.0 && y == 0.0 {
                continue;
            }
            self.set(p, k, c * x + s * y);
            self.set(q, k, c * y - s * x);
        }
        let (app, aqq, apq) = (self.get(p, p), self.get(q, q), self.get(p, q));
        self.set(p, p, c * c * app + 2.0 * c * s * apq + s * s * aqq);
        self.set(q, q, s * s * app - 2.0 * c * s * apq + c * c * aqq);
        self.set(p, q, (c * c - s * s) * apq + c * s * (aqq - app));
    }

    /// Zeroes `(row, col)` against `(row − 1, col)`.
    fn annihilate(&mut self, row: usize, col: usize) {
        let b = self.get(row, col);
        if b == 0.0 {
            return;
        }
        let a = self.get(row - 1, col);
        let r = a.hypot(b);
        self.rotate(row - 1, a / r, b / r);
        self.set(row, col, 0.0);
    }
}

/// Diagonal and off-diagonal of an orthogonally similar tridiagonal matrix.
pub fn tridiagonalize(m: &BandedSymmetricMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = m.dim();
    let b = m.effective_bandwidth().min(n.saturating_sub(1));
    let mut w = Work::from(m, b);
    for d in (2..=b).rev() {
        for j in 0..n.saturating_sub(d) {
            let mut row = j + d;
            let mut col = j;
            // Each rotation pushes a bulge d rows further down.
            while row < n {
                w.annihilate(row, col);
                col = row - 1;
                row += d;
            }
        }
    }
    let diag = (0..n).map(|i| w.get(i, i)).collect();
    let off = (1..n).map(|i| w.get(i, i - 1)).collect();
    (diag, off)
}

/// Number of eigenvalues of the tridiagonal matrix strictly below `x`.
fn sturm_count(diag: &[f64], off2: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..diag.len() {
        let prev = if i == 0 { 0.0 } else { off2[i - 1] / q };
        q = diag[i] - x - prev;
        if q == 0.0 {
            q = -f64::EPSILON * (diag[i].abs() + x.abs()).max(f64::MIN_POSITIVE);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// The `m` smallest eigenvalues of a symmetric tridiagonal matrix, ascending.
pub fn tridiagonal_lowest(diag: &[f64], off: &[f64], m: usize) -> Result<Vec<f64>> {
    let n = diag.len();
    if m > n {
        return Err(Error::InvalidInput(format!("asked for {m} eigenvalues of a {n}×{n} matrix")));
    }
    let off2: Vec<f64> = off.iter().map(|e| e * e).collect();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..n {
        let r = if i > 0 { off[i - 1].abs() } else { 0.0 } + if i + 1 < n { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    let pad = f64::EPSILON * lo.abs().max(hi.abs()).max(1.0) * n as f64;
    let (lo, hi) = (lo - pad, hi + pad);
    let mut out = Vec::with_capacity(m);
    for idx in 0..m {
        let (mut a, mut b) = (out.last().copied().unwrap_or(lo).max(lo), hi);
        let mut steps = 0;
        loop {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            if sturm_count(diag, &off2, mid) > idx {
                b = mid;
            } else {
                a = mid;
            }
            steps += 1;
            if steps > MAX_BISECTIONS {
                return Err(Error::Solver(format!("bisection for eigenvalue {idx} did not converge")));
            }
        }
        out.push(0.5 * (a + b));
    }
    Ok(out)
}

/// The `m` algebraically smallest eigenvalues, ascending.
pub fn lowest_eigenvalues(m: &BandedSymmetricMatrix, count: usize) -> Result<Vec<f64>> {
    if !m.is_finite() {
        return Err(Error::Solver("matrix has non-finite entries".into()));
    }
    if count > m.dim() {
        return Err(Error::InvalidInput(format!(
            "asked for {count} eigenvalues of a {}×{} matrix",
            m.dim(),
            m.dim()
        )));
    }
    let (diag, off) = tridiagonalize(m);
    let vals = tridiagonal_lowest(&diag, &off, count)?;
    if vals.iter().any(|v| !v.is_finite()) {
        return Err(Error::Solver("non-finite eigenvalue".into()));
    }
    Ok(vals)
}
