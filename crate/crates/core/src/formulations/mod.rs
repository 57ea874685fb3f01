//! Domain instances for the three problem families, their exact objectives,
//! grid discretizations, QUBO builders, decoders and exact oracles.

mod hens;
mod maxflow;
mod qap;
mod qaplib;
mod uc;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qubo::QuboError;

pub use hens::{
    hens_decode, hens_discretize, hens_objective, hens_oracle, hens_to_qubo, DiscretizedHens,
    HensInstance, HensSolution, HensViolation, HENS_ORACLE_MAX_CELLS,
};
pub use qap::{
    qap_decode, qap_default_penalty, qap_objective, qap_oracle, qap_to_qubo, QapDecoded,
    QapInstance, QapSolution, QAP_ORACLE_MAX_N,
};
pub use qaplib::parse_qaplib;
pub use uc::{
    uc_choose_grids, uc_decode, uc_default_penalties, uc_discretize, uc_dispatch_oracle,
    uc_grid_oracle, uc_objective, uc_oracle, uc_to_qubo, DiscretizedUc, Dispatch, GridChoice,
    UcInstance, UcSolution, UcViolation, Unit, UC_ORACLE_MAX_UNITS,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FormulationError {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid penalty weights: {0}")]
    InvalidWeights(String),
    #[error("not a permutation: {0:?}")]
    NotPermutation(Vec<usize>),
    #[error("instance of size {size} exceeds the oracle limit {limit}")]
    TooLarge { size: usize, limit: usize },
    #[error("truncated input: expected {expected} numbers, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("non-numeric token {0:?}")]
    NonNumeric(String),
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
    #[error("grid count must be at least 1, got {0}")]
    InvalidGrid(usize),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error(transparent)]
    Qubo(#[from] QuboError),
}

pub type Result<T> = std::result::Result<T, FormulationError>;

/// Penalty multipliers `A` and `B`. QAP uses only `a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PenaltyWeights {
    pub a: f64,
    pub b: f64,
}

impl PenaltyWeights {
    pub fn new(a: f64, b: f64) -> Self {
        Self { a, b }
    }

    /// Defaults for the minimum-matches problem.
    pub const HENS_DEFAULT: PenaltyWeights = PenaltyWeights { a: 20.0, b: 5.0 };

    fn require_positive(&self, need_b: bool) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !ok(self.a) || (need_b && !ok(self.b)) {
            return Err(FormulationError::InvalidWeights(format!(
                "a = {}, b = {} (must be positive and finite)",
                self.a, self.b
            )));
        }
        Ok(())
    }
}

/// Domain meaning of a QUBO variable.
///
/// Fields are 0-based positions. The display form is 1-based, so
/// `Level { unit: 0, point: 1 }` prints as `z(1,2)` (second grid point of the
/// first unit) and `Flow { level: 3, .. }` is the flow `4·U/N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VarLabel {
    /// `x(p,i)`: plant `p` sits at location `i`.
    Assign { plant: usize, location: usize },
    /// `v(i)`: unit `i` is offline.
    Offline { unit: usize },
    /// `z(i,k)`: unit `i` runs at grid point `k` (`p_min + k·h`).
    Level { unit: usize, point: usize },
    /// `w(i,j)`: source `i` and sink `j` are matched.
    Match { source: usize, sink: usize },
    /// `z(i,j,k)`: source `i` sends `(k+1)·U_ij/N` to sink `j`.
    Flow {
        source: usize,
        sink: usize,
        level: usize,
    },
}

impl fmt::Display for VarLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            VarLabel::Assign { plant, location } => write!(f, "x({},{})", plant + 1, location + 1),
            VarLabel::Offline { unit } => write!(f, "v({})", unit + 1),
            VarLabel::Level { unit, point } => write!(f, "z({},{})", unit + 1, point + 1),
            VarLabel::Match { source, sink } => write!(f, "w({},{})", source + 1, sink + 1),
            VarLabel::Flow {
                source,
                sink,
                level,
            } => write!(f, "z({},{},{})", source + 1, sink + 1, level + 1),
        }
    }
}

/// Bijection between domain labels and QUBO indices.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VarMap {
    labels: Vec<VarLabel>,
    index: HashMap<VarLabel, usize>,
}

impl VarMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a label and returns its index. Panics on a duplicate label.
    pub fn push(&mut self, label: VarLabel) -> usize {
        let i = self.labels.len();
        let prev = self.index.insert(label, i);
        assert!(prev.is_none(), "duplicate variable label {label}");
        self.labels.push(label);
        i
    }

    pub fn index_of(&self, label: &VarLabel) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn label(&self, index: usize) -> Option<VarLabel> {
        self.labels.get(index).copied()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[VarLabel] {
        &self.labels
    }

    pub fn names(&self) -> BTreeMap<usize, String> {
        self.labels
            .iter()
            .enumerate()
            .map(|(i, l)| (i, l.to_string()))
            .collect()
    }
}

pub(crate) fn check_square(name: &str, m: &[Vec<f64>], n: usize) -> Result<()> {
    if m.len() != n || m.iter().any(|row| row.len() != n) {
        return Err(FormulationError::DimensionMismatch(format!(
            "{name} must be {n}x{n}"
        )));
    }
    Ok(())
}

pub(crate) fn check_nonneg_finite(name: &str, v: f64) -> Result<()> {
    if !v.is_finite() || v < 0.0 {
        return Err(FormulationError::InvalidInstance(format!(
            "{name} must be finite and non-negative, got {v}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn varmap_is_bijective() {
        let mut m = VarMap::new();
        let a = m.push(VarLabel::Offline { unit: 0 });
        let b = m.push(VarLabel::Level { unit: 0, point: 2 });
        assert_eq!((a, b), (0, 1));
        assert_eq!(m.index_of(&VarLabel::Level { unit: 0, point: 2 }), Some(1));
        assert_eq!(m.label(0), Some(VarLabel::Offline { unit: 0 }));
        assert_eq!(m.names()[&1], "z(1,3)");
    }

    #[test]
    #[should_panic(expected = "duplicate")]
    fn varmap_rejects_duplicates() {
        let mut m = VarMap::new();
        m.push(VarLabel::Match { source: 0, sink: 0 });
        m.push(VarLabel::Match { source: 0, sink: 0 });
    }

    #[test]
    fn weights_validation() {
        assert!(PenaltyWeights::new(1.0, 0.0)
            .require_positive(false)
            .is_ok());
        assert!(PenaltyWeights::new(1.0, 0.0)
            .require_positive(true)
            .is_err());
        assert!(PenaltyWeights::new(f64::NAN, 1.0)
            .require_positive(false)
            .is_err());
    }
}
