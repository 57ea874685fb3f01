//! QUBO minimizers: exhaustive search, simulated annealing, tabu search and
//! a decompose-and-stitch driver for models too large for the exact solver.

mod anneal;
mod brute;
mod decomp;
mod fields;
mod samples;
mod solve;
mod tabu;

use thiserror::Error;

use crate::gate::GateError;
use crate::qubo::QuboError;

pub use anneal::{simulated_anneal, SaParams};
pub use brute::{brute_force, BRUTE_FORCE_MAX_VARS};
pub use decomp::{decompose_solve, decompose_solve_traced, DecompParams, DecompStep};
pub use samples::{SampleMeta, SampleRecord, SampleSet};
pub use solve::{solve, Strategy};
pub use tabu::{default_tenure, tabu_search, tabu_search_from, TabuParams};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("{solver} handles at most {limit} variables, model has {num_vars}")]
    TooLarge {
        solver: &'static str,
        num_vars: usize,
        limit: usize,
    },
    #[error("model has no variables")]
    Empty,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("unknown strategy {0:?} (expected brute, sa, tabu, decomp or vqe)")]
    UnknownStrategy(String),
    #[error(transparent)]
    Qubo(#[from] QuboError),
    #[error(transparent)]
    Gate(#[from] GateError),
}

pub type Result<T> = std::result::Result<T, SolverError>;

fn require_vars(model: &crate::qubo::Qubo) -> Result<()> {
    if model.num_vars() == 0 {
        return Err(SolverError::Empty);
    }
    Ok(())
}
