use std::collections::BTreeMap;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{basis_bits, GateError, Result, Statevector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sampling {
    /// Squared amplitudes.
    Exact,
    /// Multinomial draws from a seeded generator.
    Shots { shots: usize, seed: u64 },
}

/// Outcome distribution keyed by bitstring (variable order).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub num_qubits: usize,
    /// `None` for exact probabilities.
    pub shots: Option<usize>,
    pub probabilities: BTreeMap<String, f64>,
}

impl Histogram {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("histograms always serialize")
    }
}

fn label(b: usize, n: usize) -> String {
    basis_bits(b, n)
        .iter()
        .map(|&v| if v == 1 { '1' } else { '0' })
        .collect()
}

/// Exact mode keeps every outcome with nonzero probability; shot mode keeps
/// every outcome drawn at least once, as a frequency.
pub fn sample_distribution(state: &Statevector, mode: Sampling) -> Result<Histogram> {
    let n = state.num_qubits();
    let probs = state.probabilities();
    match mode {
        Sampling::Exact => Ok(Histogram {
            num_qubits: n,
            shots: None,
            probabilities: probs
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 0.0)
                .map(|(b, &p)| (label(b, n), p))
                .collect(),
        }),
        Sampling::Shots { shots, seed } => {
            if shots == 0 {
                return Err(GateError::InvalidConfig("shots must be at least 1".into()));
            }
            let dist = WeightedIndex::new(&probs)
                .map_err(|e| GateError::InvalidConfig(format!("cannot sample state: {e}")))?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut counts = vec![0usize; probs.len()];
            for _ in 0..shots {
                counts[dist.sample(&mut rng)] += 1;
            }
            Ok(Histogram {
                num_qubits: n,
                shots: Some(shots),
                probabilities: counts
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| c > 0)
                    .map(|(b, &c)| (label(b, n), c as f64 / shots as f64))
                    .collect(),
            })
        }
    }
}
