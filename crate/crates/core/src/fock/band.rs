/// Real symmetric matrix with `|i − j| ≤ bandwidth` outside of which all
/// entries vanish. Only the upper band is stored; reads mirror it, so the
/// matrix is symmetric by construction.
#[derive(Clone, Debug, PartialEq)]
pub struct BandedSymmetricMatrix {
    dim: usize,
    bandwidth: usize,
    // (i, i + d) lives at d * dim + i
    upper: Vec<f64>,
}

impl BandedSymmetricMatrix {
    pub fn zeros(dim: usize, bandwidth: usize) -> Self {
        BandedSymmetricMatrix { dim, bandwidth, upper: vec![0.0; (bandwidth + 1) * dim] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of stored super-diagonals.
    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        let d = j - i;
        if d > self.bandwidth || j >= self.dim {
            0.0
        } else {
            self.upper[d * self.dim + i]
        }
    }

    /// Sets `(i, j)` and `(j, i)`. Panics outside the band.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        let d = j - i;
        assert!(d <= self.bandwidth && j < self.dim, "({i}, {j}) outside the band");
        self.upper[d * self.dim + i] = v;
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.upper[..self.dim]
    }

    /// Smallest `b` with all entries beyond distance `b` equal to zero.
    pub fn effective_bandwidth(&self) -> usize {
        (0..=self.bandwidth)
            .rev()
            .find(|&d| self.upper[d * self.dim..(d + 1) * self.dim].iter().any(|&x| x != 0.0))
            .unwrap_or(0)
    }

    pub fn is_finite(&self) -> bool {
        self.upper.iter().all(|x| x.is_finite())
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.dim;
        let mut out = vec![0.0; n * n];
        for d in 0..=self.bandwidth.min(n.saturating_sub(1)) {
            for i in 0..n - d {
                let v = self.upper[d * n + i];
                out[i * n + i + d] = v;
                out[(i + d) * n + i] = v;
            }
        }
        out
    }
}
