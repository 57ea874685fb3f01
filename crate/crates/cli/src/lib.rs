//! Instance generation, formulate/solve/decode pipelines and deviation
//! reporting behind the `qubo-energy` command-line tool.

pub mod bench;
pub mod generate;
pub mod problem;
pub mod report;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use qubo_energy::formulations::FormulationError;
use qubo_energy::solvers::SolverError;

pub use bench::{run_bench, BenchReport, SolverSpec, Suite, SuiteInstance};
pub use generate::{
    gen_hens, gen_uc, GenSpec, GeneratedHens, GeneratedUc, HensGenSpec, Range, UcGenSpec,
};
pub use problem::{Decoded, Penalties, Problem};
pub use report::{
    deviation, deviation_histogram, deviation_stats, read_csv, write_csv, write_histogram_csv,
    BenchRow, FamilyStats, HistogramBin,
};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid specification: {0}")]
    InvalidSpec(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("no reference for {0}: {1}")]
    OracleUnavailable(String, String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Formulation(#[from] FormulationError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl BenchError {
    /// 1 usage, 2 infeasible or oracle unavailable, 3 invariant failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::OracleUnavailable(..)
            | BenchError::Formulation(FormulationError::Infeasible(_))
            | BenchError::Formulation(FormulationError::TooLarge { .. }) => 2,
            BenchError::Invariant(_) | BenchError::Solver(SolverError::Qubo(_)) => 3,
            _ => 1,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        BenchError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, BenchError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Qap,
    Uc,
    Hens,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Qap => "qap",
            Family::Uc => "uc",
            Family::Hens => "hens",
        })
    }
}

impl FromStr for Family {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "qap" => Ok(Family::Qap),
            "uc" => Ok(Family::Uc),
            "hens" => Ok(Family::Hens),
            other => Err(BenchError::InvalidSpec(format!("unknown family {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use qubo_energy::qubo::QuboError;

    #[test]
    fn exit_codes() {
        assert_eq!(BenchError::InvalidSpec("x".into()).exit_code(), 1);
        assert_eq!(
            BenchError::OracleUnavailable("a".into(), "b".into()).exit_code(),
            2
        );
        let infeasible = FormulationError::Infeasible("load".into());
        assert_eq!(BenchError::from(infeasible).exit_code(), 2);
        assert_eq!(BenchError::Invariant("x".into()).exit_code(), 3);
        let qubo = SolverError::Qubo(QuboError::InvalidBit(2));
        assert_eq!(BenchError::from(qubo).exit_code(), 3);
        assert_eq!(BenchError::from(SolverError::Empty).exit_code(), 1);
    }

    #[test]
    fn family_names_roundtrip() {
        for f in [Family::Qap, Family::Uc, Family::Hens] {
            assert_eq!(f.to_string().parse::<Family>().unwrap(), f);
        }
        assert!("milp".parse::<Family>().is_err());
    }
}
