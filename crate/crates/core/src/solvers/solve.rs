use std::time::Instant;

use crate::gate::{hamiltonian_from_ising, vqe_minimize, VqeConfig};
use crate::qubo::{qubo_to_ising, Qubo};

use super::{
    brute_force, decompose_solve, simulated_anneal, tabu_search, DecompParams, Result, SaParams,
    SampleMeta, SampleSet, SolverError, TabuParams,
};

#[derive(Debug, Clone, PartialEq)]
pub enum Strategy {
    Brute,
    Sa(SaParams),
    Tabu(TabuParams),
    Decomp(DecompParams),
    /// The VQE ansatz is sized from the model at solve time.
    Vqe {
        seed: u64,
        restarts: usize,
    },
}

impl Strategy {
    /// Default parameters for a named strategy.
    pub fn from_name(name: &str, seed: u64) -> Result<Self> {
        Ok(match name {
            "brute" => Strategy::Brute,
            "sa" => Strategy::Sa(SaParams::with_seed(seed)),
            "tabu" => Strategy::Tabu(TabuParams::with_seed(seed)),
            "decomp" => Strategy::Decomp(DecompParams::with_seed(seed)),
            "vqe" => Strategy::Vqe { seed, restarts: 8 },
            other => return Err(SolverError::UnknownStrategy(other.to_string())),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Strategy::Brute => "brute",
            Strategy::Sa(_) => "sa",
            Strategy::Tabu(_) => "tabu",
            Strategy::Decomp(_) => "decomp",
            Strategy::Vqe { .. } => "vqe",
        }
    }

    /// Sets the read budget: SA reads, tabu runs (`restarts + 1`) or VQE
    /// restarts. Brute force and decomposition ignore it.
    pub fn with_reads(mut self, reads: usize) -> Self {
        match &mut self {
            Strategy::Sa(p) => p.reads = reads,
            Strategy::Tabu(p) => p.restarts = reads.saturating_sub(1),
            Strategy::Vqe { restarts, .. } => *restarts = reads,
            Strategy::Brute | Strategy::Decomp(_) => {}
        }
        self
    }
}

pub fn solve(model: &Qubo, strategy: &Strategy) -> Result<SampleSet> {
    match strategy {
        Strategy::Brute => brute_force(model),
        Strategy::Sa(p) => simulated_anneal(model, p),
        Strategy::Tabu(p) => tabu_search(model, p),
        Strategy::Decomp(p) => decompose_solve(model, p),
        Strategy::Vqe { seed, restarts } => {
            let start = Instant::now();
            let ham = hamiltonian_from_ising(&qubo_to_ising(model))?;
            let mut config = VqeConfig::new(model.num_vars(), *seed);
            config.restarts = *restarts;
            let result = vqe_minimize(&ham, &config)?;
            let mut set = SampleSet::from_samples(
                model,
                [result.best_bits.into_bits()],
                SampleMeta::new("vqe", *seed, *restarts),
            )?;
            set.meta.elapsed_s = start.elapsed().as_secs_f64();
            Ok(set)
        }
    }
}
