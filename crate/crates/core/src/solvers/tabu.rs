use std::time::Instant;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::qubo::{Assignment, Qubo};

use super::fields::Adjacency;
use super::{require_vars, Result, SampleMeta, SampleSet, SolverError};

#[derive(Debug, Clone, PartialEq)]
pub struct TabuParams {
    /// Iterations a flipped variable stays tabu; see [`default_tenure`] when `None`.
    pub tenure: Option<usize>,
    /// Iterations without a new incumbent before a run ends; `10·n` when `None`.
    pub max_stall: Option<usize>,
    /// Extra runs, each starting from the incumbent with `max(2, n/4)` bits flipped.
    pub restarts: usize,
    /// Start every second extra run from a uniformly random assignment instead.
    pub random_restarts: bool,
    pub seed: u64,
}

impl Default for TabuParams {
    fn default() -> Self {
        Self {
            tenure: None,
            max_stall: None,
            restarts: 2999,
            random_restarts: true,
            seed: 0,
        }
    }
}

impl TabuParams {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }
}

/// `n/4` capped at 20, but at least `min(4, n − 1)` so small models do not
/// oscillate between two states.
pub fn default_tenure(n: usize) -> usize {
    (n / 4).clamp(n.saturating_sub(1).clamp(1, 4), 20)
}

pub fn tabu_search(model: &Qubo, params: &TabuParams) -> Result<SampleSet> {
    tabu_search_from(model, params, None)
}

/// Steepest single-flip descent with a recency tabu list. A tabu move is
/// still taken when it would beat the incumbent. Ties between moves go to
/// the lowest index. Without `initial`, the first run starts from a seeded
/// random assignment. Every run contributes its best assignment to the
/// returned set.
pub fn tabu_search_from(
    model: &Qubo,
    params: &TabuParams,
    initial: Option<&Assignment>,
) -> Result<SampleSet> {
    require_vars(model)?;
    let n = model.num_vars();
    let tenure = params.tenure.unwrap_or_else(|| default_tenure(n));
    if tenure == 0 {
        return Err(SolverError::InvalidParams(
            "tenure must be at least 1".into(),
        ));
    }
    let max_stall = params.max_stall.unwrap_or(10 * n).max(1);
    let start = Instant::now();
    let adj = Adjacency::new(model);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut bits: Vec<u8> = match initial {
        Some(a) => {
            model.check_len(a.len())?;
            a.bits().to_vec()
        }
        None => (0..n).map(|_| rng.random_range(0..2u8)).collect(),
    };
    let mut best_bits = bits.clone();
    let mut best_energy = model.energy_bits(&bits);
    let mut run_bests = Vec::with_capacity(params.restarts + 1);
    let kick = (n / 4).max(2).min(n);

    for run in 0..=params.restarts {
        if run > 0 && params.random_restarts && run % 2 == 0 {
            bits.iter_mut().for_each(|b| *b = rng.random_range(0..2u8));
        } else if run > 0 {
            bits.copy_from_slice(&best_bits);
            for i in sample(&mut rng, n, kick) {
                bits[i] ^= 1;
            }
        }
        let mut fields = adj.fields(&bits);
        let mut energy = model.energy_bits(&bits);
        let mut run_best = (energy, bits.clone());
        let mut tabu_until = vec![0usize; n];
        let mut stall = 0;
        let mut iter = 0usize;
        while stall < max_stall {
            let mut chosen: Option<(f64, usize)> = None;
            let mut fallback: Option<(f64, usize)> = None;
            for i in 0..n {
                let d = Adjacency::delta(&bits, &fields, i);
                if fallback.is_none_or(|(b, _)| d < b) {
                    fallback = Some((d, i));
                }
                let allowed = tabu_until[i] <= iter || energy + d < best_energy;
                if allowed && chosen.is_none_or(|(b, _)| d < b) {
                    chosen = Some((d, i));
                }
            }
            let (d, i) = chosen.or(fallback).expect("model has variables");
            adj.flip(&mut bits, &mut fields, i);
            energy += d;
            iter += 1;
            tabu_until[i] = iter + tenure;
            if energy < run_best.0 {
                // confirm on an exact evaluation so rounding drift in the
                // running sum cannot pose as progress
                energy = model.energy_bits(&bits);
            }
            if energy < run_best.0 {
                run_best = (energy, bits.clone());
            }
            if energy < best_energy {
                best_energy = energy;
                best_bits.copy_from_slice(&bits);
                stall = 0;
            } else {
                stall += 1;
            }
        }
        run_bests.push(run_best.1);
    }
    let mut set = SampleSet::from_samples(
        model,
        run_bests,
        SampleMeta::new("tabu", params.seed, params.restarts + 1),
    )?;
    set.meta.elapsed_s = start.elapsed().as_secs_f64();
    Ok(set)
}
