use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::qubo::Qubo;

use super::fields::Adjacency;
use super::{require_vars, Result, SampleMeta, SampleSet, SolverError};

#[derive(Debug, Clone, PartialEq)]
pub struct SaParams {
    pub reads: usize,
    pub sweeps: usize,
    /// `(beta_hot, beta_cold)`; derived from the model when `None`.
    pub beta_range: Option<(f64, f64)>,
    pub seed: u64,
}

impl Default for SaParams {
    fn default() -> Self {
        Self {
            reads: 100,
            sweeps: 1000,
            beta_range: None,
            seed: 0,
        }
    }
}

impl SaParams {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    /// `beta_hot = ln 2 / ΔE_max` accepts the steepest uphill move half the
    /// time; `beta_cold = ln 100 / ΔE_min` freezes the smallest one.
    fn betas(&self, adj: &Adjacency) -> Result<(f64, f64)> {
        let (hot, cold) = match self.beta_range {
            Some(r) => r,
            None => {
                let max = adj.max_flip_scale();
                match adj.min_coefficient() {
                    Some(min) => (2f64.ln() / max, 100f64.ln() / min),
                    None => (1.0, 1.0),
                }
            }
        };
        if !(hot.is_finite() && cold.is_finite() && hot > 0.0 && hot <= cold) {
            return Err(SolverError::InvalidParams(format!(
                "beta schedule needs 0 < beta_hot <= beta_cold, got ({hot}, {cold})"
            )));
        }
        Ok((hot, cold))
    }

    fn validate(&self) -> Result<()> {
        if self.reads == 0 || self.sweeps == 0 {
            return Err(SolverError::InvalidParams(
                "reads and sweeps must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

fn ladder(hot: f64, cold: f64, sweeps: usize) -> Vec<f64> {
    if sweeps == 1 {
        return vec![cold];
    }
    let ratio = cold / hot;
    (0..sweeps)
        .map(|t| hot * ratio.powf(t as f64 / (sweeps - 1) as f64))
        .collect()
}

/// Single-flip Metropolis annealing. Read `r` draws from its own stream
/// seeded with `seed ^ r`, so the result does not depend on how reads are
/// scheduled across threads. Each read ends with a greedy quench.
pub fn simulated_anneal(model: &Qubo, params: &SaParams) -> Result<SampleSet> {
    require_vars(model)?;
    params.validate()?;
    let start = Instant::now();
    let adj = Adjacency::new(model);
    let (hot, cold) = params.betas(&adj)?;
    let betas = ladder(hot, cold, params.sweeps);
    let n = model.num_vars();
    let samples: Vec<Vec<u8>> = (0..params.reads)
        .into_par_iter()
        .map(|read| {
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed ^ read as u64);
            let mut bits: Vec<u8> = (0..n).map(|_| rng.random_range(0..2u8)).collect();
            let mut fields = adj.fields(&bits);
            for &beta in &betas {
                for i in 0..n {
                    let d = Adjacency::delta(&bits, &fields, i);
                    if d <= 0.0 || rng.random::<f64>() < (-beta * d).exp() {
                        adj.flip(&mut bits, &mut fields, i);
                    }
                }
            }
            adj.descend(&mut bits, &mut fields);
            bits
        })
        .collect();
    let mut set = SampleSet::from_samples(
        model,
        samples,
        SampleMeta::new("sa", params.seed, params.reads),
    )?;
    set.meta.elapsed_s = start.elapsed().as_secs_f64();
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_model() {
        let s = simulated_anneal(
            &Qubo::zero(3),
            &SaParams {
                reads: 5,
                ..SaParams::default()
            },
        )
        .unwrap();
        assert_eq!(s.best().unwrap().energy, 0.0);
    }

    #[test]
    fn ladder_is_geometric() {
        let l = ladder(1.0, 100.0, 3);
        assert_eq!(l[0], 1.0);
        assert!((l[1] - 10.0).abs() < 1e-12);
        assert_eq!(l[2], 100.0);
        assert_eq!(ladder(1.0, 4.0, 1), vec![4.0]);
    }

    #[test]
    fn validation() {
        let q = Qubo::new(1, [(0, -1.0)], [], 0.0).unwrap();
        let bad = SaParams {
            reads: 0,
            ..SaParams::default()
        };
        assert!(simulated_anneal(&q, &bad).is_err());
        let bad = SaParams {
            beta_range: Some((2.0, 1.0)),
            ..SaParams::default()
        };
        assert!(simulated_anneal(&q, &bad).is_err());
        assert!(matches!(
            simulated_anneal(&Qubo::zero(0), &SaParams::default()),
            Err(SolverError::Empty)
        ));
    }

    #[test]
    fn reproducible() {
        let q = Qubo::new(
            3,
            [(0, -1.0), (2, 0.5)],
            [((0, 1), 2.0), ((1, 2), -3.0)],
            0.0,
        )
        .unwrap();
        let p = SaParams {
            reads: 20,
            sweeps: 50,
            ..SaParams::with_seed(7)
        };
        let a = simulated_anneal(&q, &p).unwrap();
        let b = simulated_anneal(&q, &p).unwrap();
        assert_eq!(a.canonical_json(), b.canonical_json());
    }
}
