use std::collections::BTreeMap;
use std::time::Instant;

use rand::seq::index::sample;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::qubo::{Assignment, Qubo};

use super::fields::Adjacency;
use super::{
    brute_force, require_vars, tabu_search_from, Result, SampleMeta, SampleSet, SolverError,
    TabuParams, BRUTE_FORCE_MAX_VARS,
};

#[derive(Debug, Clone, PartialEq)]
pub struct DecompParams {
    /// Free variables per sub-problem.
    pub sub_size: usize,
    /// Consecutive passes without improvement before stopping.
    pub stall_passes: usize,
    /// Sub-problems up to this size are solved exhaustively, larger ones by tabu.
    pub brute_limit: usize,
    /// Hard cap on passes.
    pub max_passes: usize,
    /// Runs of the full-model tabu search started from the incumbent after
    /// every pass; 0 disables it.
    pub polish_runs: usize,
    pub seed: u64,
}

impl Default for DecompParams {
    fn default() -> Self {
        Self {
            sub_size: 40,
            stall_passes: 2,
            brute_limit: 22,
            max_passes: 1000,
            polish_runs: 50,
            seed: 0,
        }
    }
}

impl DecompParams {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.sub_size < 2 {
            return Err(SolverError::InvalidParams(
                "sub-problem size must be at least 2".into(),
            ));
        }
        if self.brute_limit > BRUTE_FORCE_MAX_VARS {
            return Err(SolverError::InvalidParams(format!(
                "brute-force limit above {BRUTE_FORCE_MAX_VARS}"
            )));
        }
        Ok(())
    }

    fn sub_solve(&self, model: &Qubo, init: Option<&Assignment>, seed: u64) -> Result<SampleSet> {
        if model.num_vars() <= self.brute_limit {
            brute_force(model)
        } else {
            tabu_search_from(model, &local_tabu(model, 4, seed), init)
        }
    }
}

/// Tabu settings that stay near the starting point: perturbed-incumbent
/// restarts only, with long runs.
fn local_tabu(model: &Qubo, restarts: usize, seed: u64) -> TabuParams {
    TabuParams {
        max_stall: Some((100 * model.num_vars()).max(1000)),
        restarts,
        random_restarts: false,
        ..TabuParams::with_seed(seed)
    }
}

/// One sub-problem solve (or full-model polish) inside a pass.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompStep {
    pub pass: usize,
    /// Free variables; every variable for a polish step.
    pub free: Vec<usize>,
    pub polish: bool,
    /// Best energy of the clamped sub-model (clamped terms live in its offset).
    pub sub_energy: f64,
    /// The stitched assignment evaluated on the full model.
    pub full_energy: f64,
    pub accepted: bool,
    /// Incumbent energy after this step.
    pub incumbent: f64,
}

pub fn decompose_solve(model: &Qubo, params: &DecompParams) -> Result<SampleSet> {
    decompose_solve_traced(model, params).map(|(s, _)| s)
}

/// Decompose-and-stitch search. The incumbent starts from greedy descent on
/// a random point. Each pass ranks variables by single-flip gain, walks the
/// ranking in blocks of `sub_size/2`, tops each block up with random other
/// variables to `sub_size`, clamps everything else to the incumbent and
/// solves the sub-model. Each pass then ends with a tabu search on the full
/// model started from the incumbent (`polish_runs` runs). Only improvements replace the
/// incumbent, so its energy never increases.
pub fn decompose_solve_traced(
    model: &Qubo,
    params: &DecompParams,
) -> Result<(SampleSet, Vec<DecompStep>)> {
    require_vars(model)?;
    params.validate()?;
    let start = Instant::now();
    let n = model.num_vars();
    let meta = SampleMeta::new("decomp", params.seed, 1);
    if n <= params.sub_size {
        let mut set = params.sub_solve(model, None, params.seed)?;
        set.meta = SampleMeta {
            reads: set.meta.reads,
            ..meta
        };
        set.meta.elapsed_s = start.elapsed().as_secs_f64();
        return Ok((set, Vec::new()));
    }

    let adj = Adjacency::new(model);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut bits: Vec<u8> = (0..n).map(|_| rng.random_range(0..2u8)).collect();
    let mut fields = adj.fields(&bits);
    adj.descend(&mut bits, &mut fields);
    let mut incumbent = model.energy_bits(&bits);

    let core = (params.sub_size / 2).max(1);
    let mut trace = Vec::new();
    let mut stall = 0;
    let mut pass = 0;
    while stall < params.stall_passes && pass < params.max_passes {
        pass += 1;
        let before = incumbent;
        let mut ranking: Vec<usize> = (0..n).collect();
        let deltas: Vec<f64> = (0..n)
            .map(|i| Adjacency::delta(&bits, &fields, i))
            .collect();
        ranking.sort_by(|&a, &b| deltas[a].total_cmp(&deltas[b]).then(a.cmp(&b)));

        for block in ranking.chunks(core) {
            let mut free = vec![false; n];
            for &i in block {
                free[i] = true;
            }
            let rest: Vec<usize> = (0..n).filter(|&i| !free[i]).collect();
            let fill = (params.sub_size - block.len()).min(rest.len());
            for k in sample(&mut rng, rest.len(), fill) {
                free[rest[k]] = true;
            }
            let fixed: BTreeMap<usize, u8> =
                (0..n).filter(|&i| !free[i]).map(|i| (i, bits[i])).collect();
            let clamped = model.clamp(&fixed)?;
            let init = clamped.restrict(&bits);
            let sub = params.sub_solve(&clamped.model, Some(&init), rng.next_u64())?;
            let best = sub.best().expect("sub-solvers return at least one record");
            let stitched = clamped.expand(&best.assignment)?;
            let full_energy = model.energy_bits(stitched.bits());
            let accepted = full_energy < incumbent;
            if accepted {
                bits = stitched.into_bits();
                fields = adj.fields(&bits);
                incumbent = full_energy;
            }
            trace.push(DecompStep {
                pass,
                free: clamped.free.clone(),
                polish: false,
                sub_energy: best.energy,
                full_energy,
                accepted,
                incumbent,
            });
        }
        if params.polish_runs > 0 {
            let init = Assignment::from_bits_unchecked(bits.clone());
            let polish = local_tabu(model, params.polish_runs - 1, rng.next_u64());
            let tabu = tabu_search_from(model, &polish, Some(&init))?;
            let best = tabu.best().expect("tabu returns at least one record");
            let accepted = best.energy < incumbent;
            if accepted {
                bits = best.assignment.bits().to_vec();
                fields = adj.fields(&bits);
                incumbent = best.energy;
            }
            trace.push(DecompStep {
                pass,
                free: (0..n).collect(),
                polish: true,
                sub_energy: best.energy,
                full_energy: best.energy,
                accepted,
                incumbent,
            });
        }
        if incumbent < before {
            stall = 0;
        } else {
            stall += 1;
        }
    }
    let mut set = SampleSet::from_samples(model, [bits], meta)?;
    set.meta.elapsed_s = start.elapsed().as_secs_f64();
    Ok((set, trace))
}
