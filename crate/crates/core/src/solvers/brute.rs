use std::time::Instant;

use crate::qubo::Qubo;

use super::fields::Adjacency;
use super::{Result, SampleMeta, SampleSet, SolverError};

pub const BRUTE_FORCE_MAX_VARS: usize = 24;

/// Exact minimum by Gray-code enumeration with incremental energies.
/// Among equal energies the lexicographically smallest assignment wins.
/// An empty model yields the single empty assignment at the offset.
pub fn brute_force(model: &Qubo) -> Result<SampleSet> {
    let n = model.num_vars();
    if n > BRUTE_FORCE_MAX_VARS {
        return Err(SolverError::TooLarge {
            solver: "brute",
            num_vars: n,
            limit: BRUTE_FORCE_MAX_VARS,
        });
    }
    let start = Instant::now();
    let adj = Adjacency::new(model);
    let mut bits = vec![0u8; n];
    let mut fields = adj.fields(&bits);
    let mut energy = model.offset();
    let mut best_energy = energy;
    let mut best_bits = bits.clone();
    for step in 1u64..(1u64 << n) {
        let i = step.trailing_zeros() as usize;
        energy += Adjacency::delta(&bits, &fields, i);
        adj.flip(&mut bits, &mut fields, i);
        if energy < best_energy || (energy == best_energy && bits < best_bits) {
            best_energy = energy;
            best_bits.copy_from_slice(&bits);
        }
    }
    let mut meta = SampleMeta::new("brute", 0, 1);
    let mut set = SampleSet::from_samples(model, [best_bits], meta.clone())?;
    meta.elapsed_s = start.elapsed().as_secs_f64();
    set.meta = meta;
    Ok(set)
}
