//! Sparse neighbor lists with cached local fields for O(degree) flips.

use crate::qubo::Qubo;

pub(crate) struct Adjacency {
    linear: Vec<f64>,
    start: Vec<usize>,
    neighbor: Vec<usize>,
    weight: Vec<f64>,
}

impl Adjacency {
    pub(crate) fn new(model: &Qubo) -> Self {
        let n = model.num_vars();
        let mut linear = vec![0.0; n];
        for (&i, &a) in model.linear() {
            linear[i] = a;
        }
        let mut degree = vec![0usize; n];
        for &(i, j) in model.quadratic().keys() {
            degree[i] += 1;
            degree[j] += 1;
        }
        let mut start = vec![0usize; n + 1];
        for i in 0..n {
            start[i + 1] = start[i] + degree[i];
        }
        let mut fill = start.clone();
        let mut neighbor = vec![0usize; start[n]];
        let mut weight = vec![0.0; start[n]];
        for (&(i, j), &b) in model.quadratic() {
            for (u, v) in [(i, j), (j, i)] {
                neighbor[fill[u]] = v;
                weight[fill[u]] = b;
                fill[u] += 1;
            }
        }
        Self {
            linear,
            start,
            neighbor,
            weight,
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.linear.len()
    }

    /// `field_i = a_i + Σ_j b_ij x_j`
    pub(crate) fn fields(&self, bits: &[u8]) -> Vec<f64> {
        (0..self.len())
            .map(|i| {
                let mut f = self.linear[i];
                for k in self.start[i]..self.start[i + 1] {
                    if bits[self.neighbor[k]] == 1 {
                        f += self.weight[k];
                    }
                }
                f
            })
            .collect()
    }

    /// Energy change from flipping bit `i`.
    #[inline]
    pub(crate) fn delta(bits: &[u8], fields: &[f64], i: usize) -> f64 {
        if bits[i] == 1 {
            -fields[i]
        } else {
            fields[i]
        }
    }

    /// Flips bit `i` and updates neighbor fields.
    #[inline]
    pub(crate) fn flip(&self, bits: &mut [u8], fields: &mut [f64], i: usize) {
        let sign = if bits[i] == 1 { -1.0 } else { 1.0 };
        bits[i] ^= 1;
        for k in self.start[i]..self.start[i + 1] {
            fields[self.neighbor[k]] += sign * self.weight[k];
        }
    }

    /// `max_i (|a_i| + Σ_j |b_ij|)`
    pub(crate) fn max_flip_scale(&self) -> f64 {
        (0..self.len())
            .map(|i| {
                self.linear[i].abs()
                    + self.weight[self.start[i]..self.start[i + 1]]
                        .iter()
                        .map(|w| w.abs())
                        .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    /// Smallest nonzero coefficient magnitude, if any.
    pub(crate) fn min_coefficient(&self) -> Option<f64> {
        self.linear
            .iter()
            .chain(&self.weight)
            .map(|v| v.abs())
            .filter(|&v| v > 0.0)
            .min_by(f64::total_cmp)
    }

    /// Flips improving bits (largest decrease first, lowest index on ties)
    /// until none is left.
    pub(crate) fn descend(&self, bits: &mut [u8], fields: &mut [f64]) {
        loop {
            let mut best = (0.0, usize::MAX);
            for i in 0..self.len() {
                let d = Self::delta(bits, fields, i);
                if d < best.0 {
                    best = (d, i);
                }
            }
            if best.1 == usize::MAX {
                return;
            }
            self.flip(bits, fields, best.1);
        }
    }
}
