//! Minimum-cost matches for heat-exchanger network synthesis: pick source/sink
//! matches `w_ij` so that supplies `S_i` can be routed to demands `D_j` with
//! per-match capacity `U_ij = min(S_i, D_j)`.

use serde::{Deserialize, Serialize};

use crate::qubo::{Assignment, LinearExpr, Qubo, QuboBuilder};

use super::maxflow::FlowNetwork;
use super::{check_nonneg_finite, FormulationError, PenaltyWeights, Result, VarLabel, VarMap};

/// Largest `m·n` `hens_oracle` accepts (it enumerates match subsets).
pub const HENS_ORACLE_MAX_CELLS: usize = 16;

fn heat_tol(total: f64) -> f64 {
    1e-9 * total.abs().max(1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawHens")]
pub struct HensInstance {
    supply: Vec<f64>,
    demand: Vec<f64>,
    cost: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
struct RawHens {
    supply: Vec<f64>,
    demand: Vec<f64>,
    cost: Vec<Vec<f64>>,
}

impl TryFrom<RawHens> for HensInstance {
    type Error = FormulationError;

    fn try_from(raw: RawHens) -> Result<Self> {
        HensInstance::new(raw.supply, raw.demand, raw.cost)
    }
}

impl HensInstance {
    pub fn new(supply: Vec<f64>, demand: Vec<f64>, cost: Vec<Vec<f64>>) -> Result<Self> {
        let (m, n) = (supply.len(), demand.len());
        if m == 0 || n == 0 {
            return Err(FormulationError::InvalidInstance(
                "need at least one source and one sink".into(),
            ));
        }
        if cost.len() != m || cost.iter().any(|r| r.len() != n) {
            return Err(FormulationError::DimensionMismatch(format!(
                "cost matrix must be {m}x{n}"
            )));
        }
        for &v in supply.iter().chain(&demand).chain(cost.iter().flatten()) {
            check_nonneg_finite("heat load or cost", v)?;
        }
        let (s, d): (f64, f64) = (supply.iter().sum(), demand.iter().sum());
        if (s - d).abs() > heat_tol(s.max(d)) {
            return Err(FormulationError::InvalidInstance(format!(
                "unbalanced: total supply {s} vs total demand {d}"
            )));
        }
        Ok(Self {
            supply,
            demand,
            cost,
        })
    }

    pub fn sources(&self) -> usize {
        self.supply.len()
    }

    pub fn sinks(&self) -> usize {
        self.demand.len()
    }

    pub fn supply(&self) -> &[f64] {
        &self.supply
    }

    pub fn demand(&self) -> &[f64] {
        &self.demand
    }

    pub fn cost(&self) -> &[Vec<f64>] {
        &self.cost
    }

    /// `U_ij = min(S_i, D_j)`
    pub fn capacity(&self, i: usize, j: usize) -> f64 {
        self.supply[i].min(self.demand[j])
    }

    fn total(&self) -> f64 {
        self.supply.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedHens {
    base: HensInstance,
    grids: usize,
    capacity: Vec<Vec<f64>>,
    flows: Vec<Vec<Vec<f64>>>,
}

impl DiscretizedHens {
    pub fn base(&self) -> &HensInstance {
        &self.base
    }

    pub fn grids(&self) -> usize {
        self.grids
    }

    pub fn capacity(&self) -> &[Vec<f64>] {
        &self.capacity
    }

    /// `flows[i][j][k] = U_ij·(k+1)/N`; empty where `U_ij = 0`.
    pub fn flows(&self) -> &[Vec<Vec<f64>>] {
        &self.flows
    }

    /// Flow variables omitted because their pair has zero capacity.
    pub fn dropped_levels(&self) -> usize {
        self.flows.iter().flatten().filter(|f| f.is_empty()).count() * self.grids
    }

    /// `m·n·(N+1)` minus `dropped_levels()`.
    pub fn num_vars(&self) -> usize {
        self.flows.iter().flatten().map(|f| f.len() + 1).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum HensViolation {
    /// `Σ_j q_ij − S_i`
    SupplyBalance { source: usize, residual: f64 },
    /// `Σ_i q_ij − D_j`
    DemandBalance { sink: usize, residual: f64 },
    /// Flow above `U_ij·w_ij`.
    Logic {
        source: usize,
        sink: usize,
        flow: f64,
    },
    Negative {
        source: usize,
        sink: usize,
        flow: f64,
    },
    /// `Σ_k z_ijk` differs from `w_ij`.
    MultiSelect {
        source: usize,
        sink: usize,
        selected: usize,
        matched: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HensSolution {
    pub matches: Vec<Vec<bool>>,
    pub flows: Vec<Vec<f64>>,
    pub total_cost: f64,
    pub violations: Vec<HensViolation>,
}

impl HensSolution {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn match_count(&self) -> usize {
        self.matches.iter().flatten().filter(|&&w| w).count()
    }
}

pub fn hens_objective(
    inst: &HensInstance,
    w: &[Vec<bool>],
    q: &[Vec<f64>],
) -> Result<HensSolution> {
    let (m, n) = (inst.sources(), inst.sinks());
    let w_ok = w.len() == m && w.iter().all(|r| r.len() == n);
    let q_ok = q.len() == m && q.iter().all(|r| r.len() == n);
    if !w_ok || !q_ok {
        return Err(FormulationError::DimensionMismatch(format!(
            "matches and flows must be {m}x{n}"
        )));
    }
    let tol = heat_tol(inst.total());
    let mut violations = Vec::new();
    let mut total_cost = 0.0;
    for i in 0..m {
        for j in 0..n {
            if w[i][j] {
                total_cost += inst.cost[i][j];
            }
            let flow = q[i][j];
            if flow < -tol {
                violations.push(HensViolation::Negative {
                    source: i,
                    sink: j,
                    flow,
                });
            }
            let cap = if w[i][j] { inst.capacity(i, j) } else { 0.0 };
            if flow > cap + tol {
                violations.push(HensViolation::Logic {
                    source: i,
                    sink: j,
                    flow,
                });
            }
        }
    }
    for i in 0..m {
        let residual = q[i].iter().sum::<f64>() - inst.supply[i];
        if residual.abs() > tol {
            violations.push(HensViolation::SupplyBalance {
                source: i,
                residual,
            });
        }
    }
    for j in 0..n {
        let residual = q.iter().map(|r| r[j]).sum::<f64>() - inst.demand[j];
        if residual.abs() > tol {
            violations.push(HensViolation::DemandBalance { sink: j, residual });
        }
    }
    Ok(HensSolution {
        matches: w.to_vec(),
        flows: q.to_vec(),
        total_cost,
        violations,
    })
}

pub fn hens_discretize(inst: &HensInstance, grids: usize) -> Result<DiscretizedHens> {
    if grids < 1 {
        return Err(FormulationError::InvalidGrid(grids));
    }
    let (m, n) = (inst.sources(), inst.sinks());
    let capacity: Vec<Vec<f64>> = (0..m)
        .map(|i| (0..n).map(|j| inst.capacity(i, j)).collect())
        .collect();
    let flows = capacity
        .iter()
        .map(|row| {
            row.iter()
                .map(|&u| {
                    if u > 0.0 {
                        let mut f: Vec<f64> =
                            (1..=grids).map(|k| u * k as f64 / grids as f64).collect();
                        f[grids - 1] = u;
                        f
                    } else {
                        Vec::new()
                    }
                })
                .collect()
        })
        .collect();
    Ok(DiscretizedHens {
        base: inst.clone(),
        grids,
        capacity,
        flows,
    })
}

/// Variables per pair `(i,j)` in row-major order: `w(i,j)` then its flow
/// levels `z(i,j,k)`.
pub fn hens_to_qubo(d: &DiscretizedHens, weights: &PenaltyWeights) -> Result<(Qubo, VarMap)> {
    weights.require_positive(true)?;
    let inst = &d.base;
    let (m, n) = (inst.sources(), inst.sinks());
    let mut map = VarMap::new();
    let mut matches = vec![vec![0usize; n]; m];
    let mut levels = vec![vec![Vec::new(); n]; m];
    for i in 0..m {
        for j in 0..n {
            matches[i][j] = map.push(VarLabel::Match { source: i, sink: j });
            levels[i][j] = (0..d.flows[i][j].len())
                .map(|k| {
                    map.push(VarLabel::Flow {
                        source: i,
                        sink: j,
                        level: k,
                    })
                })
                .collect();
        }
    }
    let mut b = QuboBuilder::new(map.len());
    let mut rows: Vec<LinearExpr> = inst
        .supply
        .iter()
        .map(|&s| LinearExpr::constant(s))
        .collect();
    let mut cols: Vec<LinearExpr> = inst
        .demand
        .iter()
        .map(|&t| LinearExpr::constant(t))
        .collect();
    for i in 0..m {
        for j in 0..n {
            b.add_linear(matches[i][j], inst.cost[i][j])?;
            let mut logic = LinearExpr::constant(0.0).term(matches[i][j], 1.0);
            for (k, &z) in levels[i][j].iter().enumerate() {
                let f = d.flows[i][j][k];
                logic.push(z, -1.0);
                rows[i].push(z, -f);
                cols[j].push(z, -f);
            }
            b.add_squared_penalty(&logic, weights.a)?;
        }
    }
    for e in rows.iter().chain(&cols) {
        b.add_squared_penalty(e, weights.b)?;
    }
    for (i, name) in map.names() {
        b.name(i, name)?;
    }
    Ok((b.build()?, map))
}

pub fn hens_decode(x: &Assignment, map: &VarMap, d: &DiscretizedHens) -> Result<HensSolution> {
    let inst = &d.base;
    let (m, n) = (inst.sources(), inst.sinks());
    if x.len() != map.len() {
        return Err(FormulationError::DimensionMismatch(format!(
            "assignment of length {} for {} variables",
            x.len(),
            map.len()
        )));
    }
    let mut w = vec![vec![false; n]; m];
    let mut q = vec![vec![0.0; n]; m];
    let mut selected = vec![vec![0usize; n]; m];
    for (idx, label) in map.labels().iter().enumerate() {
        if !x.is_set(idx) {
            continue;
        }
        match *label {
            VarLabel::Match { source, sink } => w[source][sink] = true,
            VarLabel::Flow {
                source,
                sink,
                level,
            } => {
                q[source][sink] += d.flows[source][sink][level];
                selected[source][sink] += 1;
            }
            other => {
                return Err(FormulationError::DimensionMismatch(format!(
                    "unexpected variable {other} in a heat-exchanger map"
                )))
            }
        }
    }
    let mut sol = hens_objective(inst, &w, &q)?;
    for i in 0..m {
        for j in 0..n {
            if selected[i][j] != usize::from(w[i][j]) {
                sol.violations.push(HensViolation::MultiSelect {
                    source: i,
                    sink: j,
                    selected: selected[i][j],
                    matched: w[i][j],
                });
            }
        }
    }
    Ok(sol)
}

/// Exact minimum-cost match set. Subsets are visited in ascending
/// `(cost, w)` order, `w` compared row-major with `false < true`; the first
/// one whose transportation problem is feasible (checked by max-flow) wins.
pub fn hens_oracle(inst: &HensInstance) -> Result<HensSolution> {
    let (m, n) = (inst.sources(), inst.sinks());
    let cells = m * n;
    if cells > HENS_ORACLE_MAX_CELLS {
        return Err(FormulationError::TooLarge {
            size: cells,
            limit: HENS_ORACLE_MAX_CELLS,
        });
    }
    let tol = heat_tol(inst.total());
    // bit (cells-1-c) of a mask is cell c = i·n + j, so integer order is lexicographic
    let cell_set = |mask: u32, c: usize| mask >> (cells - 1 - c) & 1 == 1;
    let mut order: Vec<(f64, u32)> = (0u32..1 << cells)
        .map(|mask| {
            let cost = (0..cells)
                .filter(|&c| cell_set(mask, c))
                .map(|c| inst.cost[c / n][c % n])
                .sum();
            (cost, mask)
        })
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    for (_, mask) in order {
        let covers = (0..m).all(|i| {
            inst.supply[i] <= tol
                || (0..n)
                    .filter(|&j| cell_set(mask, i * n + j))
                    .map(|j| inst.capacity(i, j))
                    .sum::<f64>()
                    >= inst.supply[i] - tol
        }) && (0..n).all(|j| {
            inst.demand[j] <= tol
                || (0..m)
                    .filter(|&i| cell_set(mask, i * n + j))
                    .map(|i| inst.capacity(i, j))
                    .sum::<f64>()
                    >= inst.demand[j] - tol
        });
        if !covers {
            continue;
        }
        let (src, dst) = (0, m + n + 1);
        let mut g = FlowNetwork::new(m + n + 2);
        for i in 0..m {
            g.add_capacity(src, 1 + i, inst.supply[i]);
        }
        for j in 0..n {
            g.add_capacity(1 + m + j, dst, inst.demand[j]);
        }
        for c in (0..cells).filter(|&c| cell_set(mask, c)) {
            let (i, j) = (c / n, c % n);
            g.add_capacity(1 + i, 1 + m + j, inst.capacity(i, j));
        }
        let pushed = g.max_flow(src, dst, tol * 1e-3);
        if pushed >= inst.total() - tol {
            let w: Vec<Vec<bool>> = (0..m)
                .map(|i| (0..n).map(|j| cell_set(mask, i * n + j)).collect())
                .collect();
            let q: Vec<Vec<f64>> = (0..m)
                .map(|i| (0..n).map(|j| g.flow(1 + i, 1 + m + j).max(0.0)).collect())
                .collect();
            return hens_objective(inst, &w, &q);
        }
    }
    Err(FormulationError::Infeasible(
        "no match set routes the supplies".into(),
    ))
}
