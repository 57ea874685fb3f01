use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use qubo_energy::solvers::{solve, Strategy};

use crate::generate::{gen_hens, gen_uc, GenSpec};
use crate::problem::{Penalties, Problem};
use crate::report::{deviation, BenchRow};
use crate::{BenchError, Family, Result};

/// Benchmark suite file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Suite {
    #[serde(default)]
    pub instances: Vec<SuiteInstance>,
    #[serde(default)]
    pub solvers: Vec<SolverSpec>,
}

/// An instance read from `path` (with `family`) or built from `generate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteInstance {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<Family>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generate: Option<GenSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grids: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub penalty_a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub penalty_b: Option<f64>,
    /// Best-known objective; used instead of the exact oracle.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reads: Option<usize>,
}

impl SolverSpec {
    pub fn strategy(&self) -> Result<Strategy> {
        let s = Strategy::from_name(&self.name, self.seed)?;
        Ok(match self.reads {
            Some(r) => s.with_reads(r),
            None => s,
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BenchReport {
    /// Sorted by instance id, solver name, then seed.
    pub rows: Vec<BenchRow>,
    /// Instances whose reference is a supplied best-known value rather
    /// than an exact oracle result.
    pub external_references: BTreeSet<String>,
}

impl Suite {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| BenchError::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

impl SuiteInstance {
    /// Relative paths are resolved against `base`.
    pub fn load(&self, base: &Path) -> Result<Problem> {
        match (&self.path, &self.generate) {
            (Some(path), None) => {
                let family = self.family.ok_or_else(|| {
                    BenchError::InvalidSpec(format!("instance {}: file needs a family", self.id))
                })?;
                Problem::read(family, &base.join(path), self.grids)
            }
            (None, Some(GenSpec::Uc(spec))) => {
                let inst = gen_uc(spec)?.instance;
                Problem::from_uc(&inst, Some(self.grids.unwrap_or(spec.grids)))
            }
            (None, Some(GenSpec::Hens(spec))) => {
                let inst = gen_hens(spec)?.instance;
                Problem::from_hens(&inst, Some(self.grids.unwrap_or(spec.grids)))
            }
            _ => Err(BenchError::InvalidSpec(format!(
                "instance {}: give exactly one of path or generate",
                self.id
            ))),
        }
    }

    fn penalties(&self) -> Penalties {
        Penalties {
            a: self.penalty_a,
            b: self.penalty_b,
        }
    }
}

/// Relative energy slack allowed when re-verifying sample energies.
const ENERGY_RECHECK_TOL: f64 = 1e-9;

/// Formulates, solves and decodes every (instance, solver) pair and scores
/// the decoded objective against the instance reference.
pub fn run_bench(suite: &Suite, base: &Path) -> Result<BenchReport> {
    let mut ids = BTreeSet::new();
    for inst in &suite.instances {
        if !ids.insert(&inst.id) {
            return Err(BenchError::InvalidSpec(format!(
                "duplicate instance id {}",
                inst.id
            )));
        }
    }
    let strategies: Vec<(&SolverSpec, Strategy)> = suite
        .solvers
        .iter()
        .map(|s| s.strategy().map(|st| (s, st)))
        .collect::<Result<_>>()?;

    let mut report = BenchReport::default();
    for inst in &suite.instances {
        let problem = inst.load(base)?;
        let reference = match inst.reference {
            Some(r) => {
                report.external_references.insert(inst.id.clone());
                r
            }
            None => problem
                .oracle()
                .map_err(|e| BenchError::OracleUnavailable(inst.id.clone(), e.to_string()))?,
        };
        let (model, map) = problem.formulate(inst.penalties())?;
        log::info!("{}: {} variables", inst.id, model.num_vars());
        for (spec, strategy) in &strategies {
            let start = Instant::now();
            let set = solve(&model, strategy)?;
            let elapsed_s = start.elapsed().as_secs_f64();
            let scale = model.max_abs_coefficient().max(1.0);
            if set.max_energy_error(&model)? > ENERGY_RECHECK_TOL * scale {
                return Err(BenchError::Invariant(format!(
                    "{} / {}: sample energies do not match the model",
                    inst.id, spec.name
                )));
            }
            let best = set
                .best()
                .ok_or_else(|| BenchError::Invariant("solver returned no samples".into()))?;
            let decoded = problem.decode(&best.assignment, &map)?;
            report.rows.push(BenchRow {
                instance: inst.id.clone(),
                family: problem.family(),
                solver: spec.name.clone(),
                seed: spec.seed,
                qubo_energy: best.energy,
                objective: decoded.objective,
                feasible: decoded.feasible,
                reference: Some(reference),
                deviation_pct: decoded.objective.and_then(|o| deviation(o, reference)),
                elapsed_s,
            });
        }
    }
    report
        .rows
        .sort_by(|a, b| (&a.instance, &a.solver, a.seed).cmp(&(&b.instance, &b.solver, b.seed)));
    Ok(report)
}
