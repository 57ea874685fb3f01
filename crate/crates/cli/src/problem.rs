use std::path::Path;

use qubo_energy::formulations::{
    hens_decode, hens_discretize, hens_oracle, hens_to_qubo, parse_qaplib, qap_decode,
    qap_default_penalty, qap_oracle, qap_to_qubo, uc_choose_grids, uc_decode, uc_default_penalties,
    uc_discretize, uc_grid_oracle, uc_to_qubo, DiscretizedHens, DiscretizedUc, HensInstance,
    PenaltyWeights, QapInstance, UcInstance, VarMap,
};
use qubo_energy::qubo::{Assignment, Qubo};

use crate::{BenchError, Family, Result};

/// Grid count for HENS when none is given.
pub const DEFAULT_HENS_GRIDS: usize = 4;
/// Relative gap used to pick a UC grid when none is given.
pub const UC_GRID_TOL: f64 = 1e-4;

/// Penalty overrides; missing values fall back to the family default.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Penalties {
    pub a: Option<f64>,
    pub b: Option<f64>,
}

/// A loaded instance, discretized where the family needs it.
#[derive(Debug, Clone, PartialEq)]
pub enum Problem {
    Qap(QapInstance),
    Uc(DiscretizedUc),
    Hens(DiscretizedHens),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decoded {
    pub feasible: bool,
    /// Domain objective; only reported for feasible assignments.
    pub objective: Option<f64>,
}

impl Problem {
    /// QAP instances are QAPLIB text, UC and HENS instances JSON.
    pub fn parse(family: Family, text: &str, grids: Option<usize>) -> Result<Self> {
        match family {
            Family::Qap => Ok(Problem::Qap(parse_qaplib(text)?)),
            Family::Uc => Problem::from_uc(&serde_json::from_str(text)?, grids),
            Family::Hens => Problem::from_hens(&serde_json::from_str(text)?, grids),
        }
    }

    pub fn read(family: Family, path: &Path, grids: Option<usize>) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| BenchError::io(path, e))?;
        Problem::parse(family, &text, grids)
    }

    /// Without `grids`, the smallest power of two within [`UC_GRID_TOL`] of
    /// the continuous optimum.
    pub fn from_uc(inst: &UcInstance, grids: Option<usize>) -> Result<Self> {
        let grids = match grids {
            Some(n) => n,
            None => uc_choose_grids(inst, UC_GRID_TOL)?.grids,
        };
        Ok(Problem::Uc(uc_discretize(inst, grids)?))
    }

    pub fn from_hens(inst: &HensInstance, grids: Option<usize>) -> Result<Self> {
        Ok(Problem::Hens(hens_discretize(
            inst,
            grids.unwrap_or(DEFAULT_HENS_GRIDS),
        )?))
    }

    pub fn family(&self) -> Family {
        match self {
            Problem::Qap(_) => Family::Qap,
            Problem::Uc(_) => Family::Uc,
            Problem::Hens(_) => Family::Hens,
        }
    }

    pub fn weights(&self, overrides: Penalties) -> PenaltyWeights {
        let default = match self {
            Problem::Qap(inst) => PenaltyWeights::new(qap_default_penalty(inst), 0.0),
            Problem::Uc(d) => uc_default_penalties(d),
            Problem::Hens(_) => PenaltyWeights::HENS_DEFAULT,
        };
        PenaltyWeights::new(
            overrides.a.unwrap_or(default.a),
            overrides.b.unwrap_or(default.b),
        )
    }

    pub fn formulate(&self, overrides: Penalties) -> Result<(Qubo, VarMap)> {
        let w = self.weights(overrides);
        Ok(match self {
            Problem::Qap(inst) => qap_to_qubo(inst, &w)?,
            Problem::Uc(d) => uc_to_qubo(d, &w)?,
            Problem::Hens(d) => hens_to_qubo(d, &w)?,
        })
    }

    pub fn decode(&self, x: &Assignment, map: &VarMap) -> Result<Decoded> {
        let (feasible, objective) = match self {
            Problem::Qap(inst) => match qap_decode(x, map, inst)?.solution() {
                Some(s) => (true, s.objective),
                None => (false, f64::NAN),
            },
            Problem::Uc(d) => {
                let s = uc_decode(x, map, d)?;
                (s.is_feasible(), s.total)
            }
            Problem::Hens(d) => {
                let s = hens_decode(x, map, d)?;
                (s.is_feasible(), s.total_cost)
            }
        };
        Ok(Decoded {
            feasible,
            objective: feasible.then_some(objective),
        })
    }

    /// Exact optimum of the instance as formulated: the QAP optimum, the UC
    /// optimum over the chosen grid, or the minimum match cost.
    pub fn oracle(&self) -> Result<f64> {
        Ok(match self {
            Problem::Qap(inst) => qap_oracle(inst)?.objective,
            Problem::Uc(d) => uc_grid_oracle(d)?.total,
            Problem::Hens(d) => hens_oracle(d.base())?.total_cost,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qap_pipeline_pieces() {
        let text = "3\n0 1 2\n1 0 3\n2 3 0\n0 5 1\n5 0 2\n1 2 0\n";
        let p = Problem::parse(Family::Qap, text, None).unwrap();
        let (q, map) = p.formulate(Penalties::default()).unwrap();
        assert_eq!(q.num_vars(), 9);
        let x: Assignment = "100010001".parse().unwrap();
        let d = p.decode(&x, &map).unwrap();
        assert!(d.feasible);
        assert_eq!(d.objective.unwrap(), q.energy(&x).unwrap());
        let bad = p
            .decode(&Assignment::new(vec![0; 9]).unwrap(), &map)
            .unwrap();
        assert_eq!(
            bad,
            Decoded {
                feasible: false,
                objective: None
            }
        );
    }

    #[test]
    fn penalty_overrides_merge() {
        let inst = HensInstance::new(vec![2.0], vec![2.0], vec![vec![1.0]]).unwrap();
        let p = Problem::from_hens(&inst, Some(2)).unwrap();
        let w = p.weights(Penalties {
            a: None,
            b: Some(7.0),
        });
        assert_eq!((w.a, w.b), (20.0, 7.0));
        assert_eq!(p.oracle().unwrap(), 1.0);
    }
}
