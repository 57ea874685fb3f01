//! Single-period unit commitment with quadratic fuel costs
//! `f_i = a_i·y_i + b_i·p_i + c_i·p_i²` and one load balance `Σ p_i = L`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::qubo::{Assignment, LinearExpr, Qubo, QuboBuilder};

use super::{FormulationError, PenaltyWeights, Result, VarLabel, VarMap};

/// Largest unit count `uc_oracle` accepts (it enumerates all commitments).
pub const UC_ORACLE_MAX_UNITS: usize = 12;

/// Cap on partial-sum states kept by the grid dynamic program.
const GRID_STATE_CAP: usize = 4_000_000;

fn load_tol(load: f64) -> f64 {
    1e-9 * load.abs().max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Unit {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub p_min: f64,
    pub p_max: f64,
}

impl Unit {
    /// Running cost at output `p`.
    pub fn cost(&self, p: f64) -> f64 {
        self.a + self.b * p + self.c * p * p
    }

    fn validate(&self, i: usize) -> Result<()> {
        let bad = |what: &str| {
            Err(FormulationError::InvalidInstance(format!(
                "unit {i}: {what}"
            )))
        };
        if ![self.a, self.b, self.c, self.p_min, self.p_max]
            .iter()
            .all(|v| v.is_finite())
        {
            return bad("non-finite coefficient");
        }
        if self.c < 0.0 {
            return bad("c must be non-negative");
        }
        if self.p_min < 0.0 || self.p_max < self.p_min {
            return bad("need 0 <= p_min <= p_max");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawUc")]
pub struct UcInstance {
    units: Vec<Unit>,
    load: f64,
}

#[derive(Deserialize)]
struct RawUc {
    units: Vec<Unit>,
    load: f64,
}

impl TryFrom<RawUc> for UcInstance {
    type Error = FormulationError;

    fn try_from(raw: RawUc) -> Result<Self> {
        UcInstance::new(raw.units, raw.load)
    }
}

impl UcInstance {
    pub fn new(units: Vec<Unit>, load: f64) -> Result<Self> {
        if units.is_empty() {
            return Err(FormulationError::InvalidInstance("no units".into()));
        }
        for (i, u) in units.iter().enumerate() {
            u.validate(i)?;
        }
        if !load.is_finite() || load < 0.0 {
            return Err(FormulationError::InvalidInstance(format!(
                "load must be finite and non-negative, got {load}"
            )));
        }
        let cap: f64 = units.iter().map(|u| u.p_max).sum();
        if cap < load - load_tol(load) {
            return Err(FormulationError::InvalidInstance(format!(
                "load {load} exceeds total capacity {cap}"
            )));
        }
        Ok(Self { units, load })
    }

    pub fn units(&self) -> &[Unit] {
        &self.units
    }

    pub fn load(&self) -> f64 {
        self.load
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }
}

/// Grid of `N+1` equally spaced outputs per unit (one point if `p_min = p_max`).
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedUc {
    base: UcInstance,
    grids: usize,
    steps: Vec<f64>,
    points: Vec<Vec<f64>>,
}

impl DiscretizedUc {
    pub fn base(&self) -> &UcInstance {
        &self.base
    }

    pub fn grids(&self) -> usize {
        self.grids
    }

    pub fn steps(&self) -> &[f64] {
        &self.steps
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    /// `n(N+2)` minus `N` for every unit with a single grid point.
    pub fn num_vars(&self) -> usize {
        self.points.iter().map(|p| p.len() + 1).sum()
    }

    /// All distinct totals reachable by switching each unit off or to one of
    /// its grid points, ascending.
    pub fn achievable_loads(&self) -> Result<Vec<f64>> {
        let dp = GridDp::run(self, self.points.len())?;
        Ok(dp.last().iter().map(|s| s.sum).collect())
    }

    fn grid_index(&self, unit: usize, p: f64, tol: f64) -> Option<usize> {
        let pts = &self.points[unit];
        let h = self.steps[unit];
        let k = if h > 0.0 {
            ((p - pts[0]) / h).round()
        } else {
            0.0
        };
        if k < 0.0 || k as usize >= pts.len() {
            return None;
        }
        let k = k as usize;
        ((pts[k] - p).abs() <= tol).then_some(k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum UcViolation {
    /// `v_i + Σ_k z_ik` counted `selected` instead of 1.
    OneHot { unit: usize, selected: usize },
    /// `Σ p_i − L`.
    LoadResidual { residual: f64 },
    /// Output outside `[p_min·y_i, p_max·y_i]`.
    PowerBounds { unit: usize, power: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UcSolution {
    pub on: Vec<bool>,
    pub power: Vec<f64>,
    pub unit_costs: Vec<f64>,
    pub total: f64,
    pub violations: Vec<UcViolation>,
}

impl UcSolution {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }

    fn assemble(inst: &UcInstance, on: Vec<bool>, power: Vec<f64>) -> Self {
        let unit_costs: Vec<f64> = inst
            .units
            .iter()
            .zip(&on)
            .zip(&power)
            .map(|((u, &y), &p)| if y { u.a } else { 0.0 } + u.b * p + u.c * p * p)
            .collect();
        let total = unit_costs.iter().sum();
        Self {
            on,
            power,
            unit_costs,
            total,
            violations: Vec::new(),
        }
    }

    fn check_load(&mut self, load: f64) {
        let residual = self.power.iter().sum::<f64>() - load;
        if residual.abs() > load_tol(load) {
            self.violations.push(UcViolation::LoadResidual { residual });
        }
    }
}

pub fn uc_objective(inst: &UcInstance, on: &[bool], power: &[f64]) -> Result<UcSolution> {
    let n = inst.units.len();
    if on.len() != n || power.len() != n {
        return Err(FormulationError::DimensionMismatch(format!(
            "{n} units, {} flags, {} outputs",
            on.len(),
            power.len()
        )));
    }
    let mut sol = UcSolution::assemble(inst, on.to_vec(), power.to_vec());
    for (i, u) in inst.units.iter().enumerate() {
        let (lo, hi) = if on[i] {
            (u.p_min, u.p_max)
        } else {
            (0.0, 0.0)
        };
        let tol = 1e-9 * u.p_max.max(1.0);
        let p = power[i];
        if !(p >= lo - tol && p <= hi + tol) {
            sol.violations
                .push(UcViolation::PowerBounds { unit: i, power: p });
        }
    }
    sol.check_load(inst.load);
    Ok(sol)
}

pub fn uc_discretize(inst: &UcInstance, grids: usize) -> Result<DiscretizedUc> {
    if grids < 1 {
        return Err(FormulationError::InvalidGrid(grids));
    }
    let mut steps = Vec::with_capacity(inst.units.len());
    let mut points = Vec::with_capacity(inst.units.len());
    for u in &inst.units {
        if u.p_max == u.p_min {
            steps.push(0.0);
            points.push(vec![u.p_min]);
            continue;
        }
        let h = (u.p_max - u.p_min) / grids as f64;
        let mut pts: Vec<f64> = (0..=grids).map(|k| u.p_min + k as f64 * h).collect();
        pts[grids] = u.p_max;
        steps.push(h);
        points.push(pts);
    }
    Ok(DiscretizedUc {
        base: inst.clone(),
        grids,
        steps,
        points,
    })
}

/// Variables per unit `i`: `v(i)` then `z(i,k)` for each grid point.
pub fn uc_to_qubo(d: &DiscretizedUc, weights: &PenaltyWeights) -> Result<(Qubo, VarMap)> {
    weights.require_positive(true)?;
    let mut map = VarMap::new();
    let mut offline = Vec::new();
    let mut levels: Vec<Vec<usize>> = Vec::new();
    for (i, pts) in d.points.iter().enumerate() {
        offline.push(map.push(VarLabel::Offline { unit: i }));
        levels.push(
            (0..pts.len())
                .map(|k| map.push(VarLabel::Level { unit: i, point: k }))
                .collect(),
        );
    }
    let mut b = QuboBuilder::new(map.len());
    let mut load = LinearExpr::constant(d.base.load);
    for (i, u) in d.base.units.iter().enumerate() {
        let pts = &d.points[i];
        let vars = &levels[i];
        for (k, &pk) in pts.iter().enumerate() {
            b.add_linear(vars[k], u.a + u.b * pk + u.c * pk * pk)?;
            for m in k + 1..pts.len() {
                b.add_quadratic(vars[k], vars[m], 2.0 * u.c * pk * pts[m])?;
            }
            load.push(vars[k], -pk);
        }
        let mut one_hot = LinearExpr::constant(-1.0).term(offline[i], 1.0);
        for &z in vars {
            one_hot.push(z, 1.0);
        }
        b.add_squared_penalty(&one_hot, weights.a)?;
    }
    b.add_squared_penalty(&load, weights.b)?;
    for (i, name) in map.names() {
        b.name(i, name)?;
    }
    Ok((b.build()?, map))
}

/// Default multipliers: `A = 10·max_i f_i(p_max)` and `B = 2·Σ_i f_i(p_max)/δ²`
/// with `δ` the smallest nonzero gap between `L` and a reachable grid total
/// (falling back to the smallest grid step when the totals are too many to
/// enumerate). Either scale falls back to 1 when all costs vanish.
pub fn uc_default_penalties(d: &DiscretizedUc) -> PenaltyWeights {
    let costs: Vec<f64> = d
        .base
        .units
        .iter()
        .map(|u| u.cost(u.p_max).max(0.0))
        .collect();
    let nonzero = |v: f64| if v > 0.0 { v } else { 1.0 };
    let max_cost = nonzero(costs.iter().copied().fold(0.0, f64::max));
    let sum_cost = nonzero(costs.iter().sum());
    let load = d.base.load;
    let tol = load_tol(load);
    let min_step = d
        .steps
        .iter()
        .copied()
        .filter(|&h| h > 0.0)
        .fold(f64::INFINITY, f64::min);
    let resolution = d
        .achievable_loads()
        .ok()
        .and_then(|sums| {
            sums.iter()
                .map(|s| (s - load).abs())
                .filter(|&g| g > tol)
                .min_by(f64::total_cmp)
        })
        .unwrap_or(min_step);
    let delta = if resolution.is_finite() {
        resolution
    } else {
        1.0
    };
    PenaltyWeights::new(10.0 * max_cost, 2.0 * sum_cost / (delta * delta))
}

pub fn uc_decode(x: &Assignment, map: &VarMap, d: &DiscretizedUc) -> Result<UcSolution> {
    let n = d.base.units.len();
    if x.len() != map.len() {
        return Err(FormulationError::DimensionMismatch(format!(
            "assignment of length {} for {} variables",
            x.len(),
            map.len()
        )));
    }
    let mut selected = vec![0usize; n];
    let mut offline = vec![false; n];
    let mut power = vec![0.0; n];
    for (idx, label) in map.labels().iter().enumerate() {
        if !x.is_set(idx) {
            continue;
        }
        match *label {
            VarLabel::Offline { unit } => {
                offline[unit] = true;
                selected[unit] += 1;
            }
            VarLabel::Level { unit, point } => {
                power[unit] += d.points[unit][point];
                selected[unit] += 1;
            }
            other => {
                return Err(FormulationError::DimensionMismatch(format!(
                    "unexpected variable {other} in a unit-commitment map"
                )))
            }
        }
    }
    let on = offline.iter().map(|&v| !v).collect();
    let mut sol = UcSolution::assemble(&d.base, on, power);
    for (unit, &count) in selected.iter().enumerate() {
        if count != 1 {
            sol.violations.push(UcViolation::OneHot {
                unit,
                selected: count,
            });
        }
    }
    sol.check_load(d.base.load);
    Ok(sol)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dispatch {
    pub power: Vec<f64>,
    pub cost: f64,
    /// Shared marginal price at the optimum.
    pub lambda: f64,
}

/// Optimal continuous dispatch for a fixed commitment, by locating the
/// marginal price `λ` at which `Σ p_i(λ) = L`. Between consecutive
/// breakpoints (`b_i + 2c_i·p_min`, `b_i + 2c_i·p_max`, and `b_i` for linear
/// units) total output is affine in `λ`, so the crossing is interpolated
/// exactly. Linear units sitting exactly at `λ` absorb the remainder in index
/// order.
pub fn uc_dispatch_oracle(inst: &UcInstance, on: &[bool]) -> Result<Dispatch> {
    let n = inst.units.len();
    if on.len() != n {
        return Err(FormulationError::DimensionMismatch(format!(
            "{n} units, {} flags",
            on.len()
        )));
    }
    let load = inst.load;
    let tol = load_tol(load);
    let active: Vec<usize> = (0..n).filter(|&i| on[i]).collect();
    let lo: f64 = active.iter().map(|&i| inst.units[i].p_min).sum();
    let hi: f64 = active.iter().map(|&i| inst.units[i].p_max).sum();
    if load < lo - tol || load > hi + tol {
        return Err(FormulationError::Infeasible(format!(
            "committed range [{lo}, {hi}] does not cover load {load}"
        )));
    }
    let mut power = vec![0.0; n];
    if active.is_empty() {
        return Ok(Dispatch {
            power,
            cost: 0.0,
            lambda: 0.0,
        });
    }

    let units = &inst.units;
    let mut breaks: Vec<f64> = Vec::new();
    for &i in &active {
        let u = &units[i];
        if u.c > 0.0 {
            breaks.push(u.b + 2.0 * u.c * u.p_min);
            breaks.push(u.b + 2.0 * u.c * u.p_max);
        } else {
            breaks.push(u.b);
        }
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();

    // output at price lam; linear units priced exactly at lam go to p_max when `high`
    let output = |i: usize, lam: f64, high: bool| -> f64 {
        let u = &units[i];
        if u.c > 0.0 {
            ((lam - u.b) / (2.0 * u.c)).clamp(u.p_min, u.p_max)
        } else if u.b < lam || (u.b == lam && high) {
            u.p_max
        } else {
            u.p_min
        }
    };
    let total =
        |lam: f64, high: bool| -> f64 { active.iter().map(|&i| output(i, lam, high)).sum() };

    let mut lambda = breaks[breaks.len() - 1];
    let mut at_break = true;
    for (k, &bp) in breaks.iter().enumerate() {
        if load <= total(bp, true) + tol {
            lambda = bp;
            break;
        }
        if let Some(&next) = breaks.get(k + 1) {
            let s_hi = total(bp, true);
            let s_next = total(next, false);
            if load < s_next {
                lambda = bp + (load - s_hi) * (next - bp) / (s_next - s_hi);
                at_break = false;
                break;
            }
        }
    }

    let mut flexible = Vec::new();
    for &i in &active {
        let u = &units[i];
        if at_break && u.c == 0.0 && u.b == lambda {
            power[i] = u.p_min;
            flexible.push(i);
        } else {
            power[i] = output(i, lambda, false);
        }
    }
    // hand the remainder to units with room, price-tied linear units first
    let mut rest = load - power.iter().sum::<f64>();
    let order: Vec<usize> = flexible
        .iter()
        .copied()
        .chain(active.iter().copied().filter(|i| !flexible.contains(i)))
        .collect();
    for i in order {
        if rest.abs() <= 0.0 {
            break;
        }
        let u = &units[i];
        let next = (power[i] + rest).clamp(u.p_min, u.p_max);
        rest -= next - power[i];
        power[i] = next;
    }
    let cost = active.iter().map(|&i| units[i].cost(power[i])).sum();
    Ok(Dispatch {
        power,
        cost,
        lambda,
    })
}

/// Minimum over all `2^n` commitments of the continuous dispatch. Ties go to
/// the lexicographically smallest commitment (off before on, unit 0 first).
pub fn uc_oracle(inst: &UcInstance) -> Result<UcSolution> {
    let n = inst.units.len();
    if n > UC_ORACLE_MAX_UNITS {
        return Err(FormulationError::TooLarge {
            size: n,
            limit: UC_ORACLE_MAX_UNITS,
        });
    }
    let mut best: Option<(Vec<bool>, Dispatch)> = None;
    for mask in 0u32..(1 << n) {
        let on: Vec<bool> = (0..n).map(|i| mask >> (n - 1 - i) & 1 == 1).collect();
        let Ok(d) = uc_dispatch_oracle(inst, &on) else {
            continue;
        };
        let better = match &best {
            None => true,
            Some((_, b)) => d.cost < b.cost - 1e-12 * b.cost.abs().max(1.0),
        };
        if better {
            best = Some((on, d));
        }
    }
    let (on, d) =
        best.ok_or_else(|| FormulationError::Infeasible("no commitment covers the load".into()))?;
    uc_objective(inst, &on, &d.power)
}

#[derive(Debug, Clone, Copy)]
struct DpState {
    sum: f64,
    cost: f64,
    prev: usize,
    /// 0 = off, `k+1` = grid point `k`
    choice: usize,
}

struct GridDp {
    layers: Vec<Vec<DpState>>,
}

impl GridDp {
    /// Runs the partial-sum recursion over the first `units` units.
    fn run(d: &DiscretizedUc, units: usize) -> Result<Self> {
        let load = d.base.load;
        let quantum = load_tol(load);
        let mut layers = vec![vec![DpState {
            sum: 0.0,
            cost: 0.0,
            prev: usize::MAX,
            choice: 0,
        }]];
        for i in 0..units {
            let u = &d.base.units[i];
            let pts = &d.points[i];
            let prev = &layers[i];
            let mut next: HashMap<i64, DpState> = HashMap::new();
            for (pi, st) in prev.iter().enumerate() {
                for choice in 0..=pts.len() {
                    let (p, c) = if choice == 0 {
                        (0.0, 0.0)
                    } else {
                        let p = pts[choice - 1];
                        (p, u.cost(p))
                    };
                    let sum = st.sum + p;
                    let key = (sum / quantum).round() as i64;
                    let cand = DpState {
                        sum,
                        cost: st.cost + c,
                        prev: pi,
                        choice,
                    };
                    next.entry(key)
                        .and_modify(|e| {
                            if cand.cost < e.cost {
                                *e = cand;
                            }
                        })
                        .or_insert(cand);
                }
            }
            if next.len() > GRID_STATE_CAP {
                return Err(FormulationError::TooLarge {
                    size: next.len(),
                    limit: GRID_STATE_CAP,
                });
            }
            let mut layer: Vec<(i64, DpState)> = next.into_iter().collect();
            layer.sort_by_key(|&(k, _)| k);
            layers.push(layer.into_iter().map(|(_, s)| s).collect());
        }
        Ok(Self { layers })
    }

    fn last(&self) -> &[DpState] {
        self.layers.last().map(Vec::as_slice).unwrap_or(&[])
    }

    /// Per-unit choices leading to `state` of layer `depth`.
    fn trace(&self, depth: usize, mut state: usize) -> Vec<usize> {
        let mut choices = vec![0; depth];
        for t in (1..=depth).rev() {
            let s = self.layers[t][state];
            choices[t - 1] = s.choice;
            state = s.prev;
        }
        choices
    }
}

/// Exact minimum over commitments and grid outputs that meet the load
/// exactly. Deterministic: partial sums are swept in ascending order and only
/// strict improvements replace a state.
pub fn uc_grid_oracle(d: &DiscretizedUc) -> Result<UcSolution> {
    let n = d.points.len();
    let load = d.base.load;
    let tol = load_tol(load);
    let dp = GridDp::run(d, n - 1)?;
    let last_unit = &d.base.units[n - 1];
    let mut best: Option<(f64, usize, usize)> = None;
    for (si, st) in dp.last().iter().enumerate() {
        let need = load - st.sum;
        let mut options = Vec::with_capacity(2);
        if need.abs() <= tol {
            options.push((0, 0.0));
        }
        if let Some(k) = d.grid_index(n - 1, need, tol) {
            options.push((k + 1, last_unit.cost(d.points[n - 1][k])));
        }
        for (choice, c) in options {
            let total = st.cost + c;
            if best.is_none_or(|(b, _, _)| total < b) {
                best = Some((total, si, choice));
            }
        }
    }
    let (_, si, last_choice) = best.ok_or_else(|| {
        FormulationError::Infeasible(format!(
            "no grid combination at N = {} meets load {load}",
            d.grids
        ))
    })?;
    let mut choices = dp.trace(n - 1, si);
    choices.push(last_choice);
    let on: Vec<bool> = choices.iter().map(|&c| c > 0).collect();
    let power: Vec<f64> = choices
        .iter()
        .enumerate()
        .map(|(i, &c)| if c == 0 { 0.0 } else { d.points[i][c - 1] })
        .collect();
    uc_objective(&d.base, &on, &power)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridChoice {
    pub grids: usize,
    /// Relative gap of the grid optimum over the continuous one
    /// (`INFINITY` when no grid combination meets the load).
    pub gap: f64,
    pub achieved: bool,
    pub continuous: f64,
    pub discrete: Option<f64>,
}

const MAX_GRIDS: usize = 1024;

/// Smallest `N` in `1, 2, 4, …, 1024` whose grid optimum is within relative
/// gap `tol` of the continuous optimum. Returns `N = 1024` with
/// `achieved = false` (and a warning) otherwise.
pub fn uc_choose_grids(inst: &UcInstance, tol: f64) -> Result<GridChoice> {
    let continuous = uc_oracle(inst)?.total;
    let mut grids = 1;
    loop {
        let d = uc_discretize(inst, grids)?;
        let discrete = match uc_grid_oracle(&d) {
            Ok(s) => Some(s.total),
            Err(FormulationError::Infeasible(_)) => None,
            Err(e) => return Err(e),
        };
        let gap = match discrete {
            Some(v) if v == continuous => 0.0,
            Some(v) => (v - continuous) / continuous.abs().max(f64::MIN_POSITIVE),
            None => f64::INFINITY,
        };
        let achieved = gap <= tol;
        if achieved || grids >= MAX_GRIDS {
            if !achieved {
                log::warn!("grid gap {gap:e} still above {tol:e} at N = {grids}");
            }
            return Ok(GridChoice {
                grids,
                gap,
                achieved,
                continuous,
                discrete,
            });
        }
        grids *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(a: f64, b: f64, c: f64, p_min: f64, p_max: f64) -> Unit {
        Unit {
            a,
            b,
            c,
            p_min,
            p_max,
        }
    }

    fn one_unit(load: f64) -> UcInstance {
        UcInstance::new(vec![unit(0.0, 1.0, 0.0, 1.0, 3.0)], load).unwrap()
    }

    #[test]
    fn instance_validation() {
        assert!(UcInstance::new(vec![unit(0.0, 1.0, -1.0, 0.0, 1.0)], 0.5).is_err());
        assert!(UcInstance::new(vec![unit(0.0, 1.0, 1.0, 2.0, 1.0)], 0.5).is_err());
        assert!(UcInstance::new(vec![unit(0.0, 1.0, 1.0, 0.0, 1.0)], 2.0).is_err());
        assert!(UcInstance::new(vec![], 0.0).is_err());
    }

    #[test]
    fn json_rejects_invalid() {
        let ok = r#"{"units":[{"a":0,"b":1,"c":0,"p_min":1,"p_max":3}],"load":2}"#;
        let inst: UcInstance = serde_json::from_str(ok).unwrap();
        assert_eq!(inst, one_unit(2.0));
        let bad = r#"{"units":[{"a":0,"b":1,"c":0,"p_min":1,"p_max":3}],"load":9}"#;
        assert!(serde_json::from_str::<UcInstance>(bad).is_err());
    }

    #[test]
    fn objective_examples() {
        let all_off = UcInstance::new(vec![unit(2.0, 1.0, 0.0, 1.0, 3.0)], 0.0).unwrap();
        let s = uc_objective(&all_off, &[false], &[0.0]).unwrap();
        assert_eq!(s.total, 0.0);
        assert!(s.is_feasible());

        let inst = UcInstance::new(vec![unit(2.0, 1.0, 0.0, 1.0, 3.0)], 2.0).unwrap();
        let s = uc_objective(&inst, &[true], &[2.0]).unwrap();
        assert_eq!(s.total, 4.0);
        assert!(s.is_feasible());

        let s = uc_objective(&inst, &[true], &[0.5]).unwrap();
        assert!(s.violations.contains(&UcViolation::PowerBounds {
            unit: 0,
            power: 0.5
        }));
        assert!(uc_objective(&inst, &[true, false], &[0.5]).is_err());
    }

    #[test]
    fn discretize_examples() {
        let d = uc_discretize(&one_unit(2.0), 2).unwrap();
        assert_eq!(d.points()[0], vec![1.0, 2.0, 3.0]);
        assert_eq!(d.steps()[0], 1.0);

        let flat = UcInstance::new(vec![unit(0.0, 1.0, 0.0, 2.0, 2.0)], 2.0).unwrap();
        let d = uc_discretize(&flat, 8).unwrap();
        assert_eq!(d.points()[0], vec![2.0]);
        assert_eq!(d.num_vars(), 2);

        let wide = UcInstance::new(vec![unit(0.0, 1.0, 0.0, 0.0, 10.0)], 2.0).unwrap();
        let d = uc_discretize(&wide, 10).unwrap();
        let expected: Vec<f64> = (0..=10).map(f64::from).collect();
        assert_eq!(d.points()[0], expected);

        assert_eq!(
            uc_discretize(&wide, 0),
            Err(FormulationError::InvalidGrid(0))
        );
    }

    #[test]
    fn qubo_examples() {
        let d = uc_discretize(&one_unit(2.0), 2).unwrap();
        let (q, map) = uc_to_qubo(&d, &PenaltyWeights::new(2000.0, 5.0)).unwrap();
        assert_eq!(q.num_vars(), 4);
        assert_eq!(map.names()[&2], "z(1,2)");
        let at = |s: &str| q.energy(&s.parse().unwrap()).unwrap();
        assert_eq!(at("0010"), 2.0);
        assert_eq!(at("0000"), 2020.0);
        let min = (0..16)
            .map(|m: u32| at(&format!("{m:04b}")))
            .fold(f64::INFINITY, f64::min);
        assert_eq!(min, 2.0);
        assert!(uc_to_qubo(&d, &PenaltyWeights::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn decode_examples() {
        let d = uc_discretize(&one_unit(2.0), 2).unwrap();
        let (_, map) = uc_to_qubo(&d, &PenaltyWeights::new(10.0, 10.0)).unwrap();
        let s = uc_decode(&"1000".parse().unwrap(), &map, &d).unwrap();
        assert_eq!((s.on[0], s.power[0], s.total), (false, 0.0, 0.0));
        assert_eq!(
            s.violations,
            vec![UcViolation::LoadResidual { residual: -2.0 }]
        );

        let s = uc_decode(&"0010".parse().unwrap(), &map, &d).unwrap();
        assert_eq!(s.power[0], 2.0);
        assert!(s.is_feasible());

        let s = uc_decode(&"0110".parse().unwrap(), &map, &d).unwrap();
        assert!(s.violations.contains(&UcViolation::OneHot {
            unit: 0,
            selected: 2
        }));
    }

    #[test]
    fn dispatch_examples() {
        let inst = UcInstance::new(
            vec![
                unit(0.0, 1.0, 0.5, 0.0, 10.0),
                unit(0.0, 2.0, 0.5, 0.0, 10.0),
            ],
            4.0,
        )
        .unwrap();
        let d = uc_dispatch_oracle(&inst, &[true, true]).unwrap();
        assert!((d.power[0] - 2.5).abs() < 1e-12 && (d.power[1] - 1.5).abs() < 1e-12);
        assert!((d.cost - 9.75).abs() < 1e-12);

        let single = UcInstance::new(vec![unit(1.0, 2.0, 0.3, 1.5, 4.0)], 1.5).unwrap();
        assert_eq!(
            uc_dispatch_oracle(&single, &[true]).unwrap().power,
            vec![1.5]
        );

        assert!(matches!(
            uc_dispatch_oracle(&inst, &[true, false]).map(|d| d.power),
            Ok(p) if p == vec![4.0, 0.0]
        ));
        let short = UcInstance::new(vec![unit(0.0, 1.0, 0.0, 0.0, 1.0)], 1.0).unwrap();
        let mut off = short.clone();
        off.load = 3.0;
        assert!(matches!(
            uc_dispatch_oracle(&off, &[true]),
            Err(FormulationError::Infeasible(_))
        ));
    }

    #[test]
    fn dispatch_linear_units_fill_in_price_order() {
        let inst = UcInstance::new(
            vec![unit(0.0, 3.0, 0.0, 0.0, 5.0), unit(0.0, 1.0, 0.0, 1.0, 2.0)],
            4.0,
        )
        .unwrap();
        let d = uc_dispatch_oracle(&inst, &[true, true]).unwrap();
        assert_eq!(d.power, vec![2.0, 2.0]);
        assert_eq!(d.cost, 8.0);
    }

    #[test]
    fn grid_oracle_and_choice() {
        let inst = one_unit(2.0);
        let s = uc_grid_oracle(&uc_discretize(&inst, 2).unwrap()).unwrap();
        assert_eq!((s.total, s.power[0]), (2.0, 2.0));
        assert!(matches!(
            uc_grid_oracle(&uc_discretize(&inst, 1).unwrap()),
            Err(FormulationError::Infeasible(_))
        ));
        let c = uc_choose_grids(&inst, 1e-4).unwrap();
        assert_eq!((c.grids, c.gap, c.achieved), (2, 0.0, true));

        // load at the cheapest commitment's p_min: endpoints suffice
        let edge = UcInstance::new(
            vec![
                unit(1.0, 1.0, 0.2, 1.25, 3.0),
                unit(5.0, 2.0, 0.1, 0.5, 2.0),
            ],
            1.25,
        )
        .unwrap();
        assert_eq!(uc_choose_grids(&edge, 1e-4).unwrap().grids, 1);
    }

    #[test]
    fn achievable_loads_enumerates_sums() {
        let d = uc_discretize(&one_unit(2.0), 2).unwrap();
        assert_eq!(d.achievable_loads().unwrap(), vec![0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn default_penalties_dominate() {
        let d = uc_discretize(&one_unit(2.0), 2).unwrap();
        let w = uc_default_penalties(&d);
        assert_eq!(w.a, 30.0);
        assert_eq!(w.b, 6.0);
    }
}
