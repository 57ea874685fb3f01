//! Koopmans-Beckmann quadratic assignment: plants `p` to locations `i`,
//! minimizing `Σ_{p,q} T_pq · C_{π(p),π(q)}`.

use crate::qubo::{Assignment, Qubo, QuboBuilder};

use super::{
    check_nonneg_finite, check_square, FormulationError, PenaltyWeights, Result, VarLabel, VarMap,
};

/// Largest size `qap_oracle` accepts.
pub const QAP_ORACLE_MAX_N: usize = 12;

/// `cost` is `C` (unit transport cost between locations), `flow` is `T`
/// (energy units between plants). Both are stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct QapInstance {
    n: usize,
    cost: Vec<f64>,
    flow: Vec<f64>,
}

impl QapInstance {
    pub fn new(cost: Vec<Vec<f64>>, flow: Vec<Vec<f64>>) -> Result<Self> {
        let n = cost.len();
        if n == 0 {
            return Err(FormulationError::InvalidInstance("empty instance".into()));
        }
        check_square("cost matrix", &cost, n)?;
        check_square("flow matrix", &flow, n)?;
        for &v in cost.iter().chain(flow.iter()).flatten() {
            check_nonneg_finite("matrix entry", v)?;
        }
        Ok(Self {
            n,
            cost: cost.into_iter().flatten().collect(),
            flow: flow.into_iter().flatten().collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `C_ij`
    #[inline]
    pub fn cost(&self, i: usize, j: usize) -> f64 {
        self.cost[i * self.n + j]
    }

    /// `T_pq`
    #[inline]
    pub fn flow(&self, p: usize, q: usize) -> f64 {
        self.flow[p * self.n + q]
    }

    /// QUBO index of `x(p,i)`.
    #[inline]
    pub fn var(&self, plant: usize, location: usize) -> usize {
        plant * self.n + location
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QapSolution {
    /// `perm[p]` is the location of plant `p`.
    pub perm: Vec<usize>,
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum QapDecoded {
    Feasible(QapSolution),
    /// Plants (rows) and locations (columns) whose assignment count is not 1.
    Infeasible {
        row_violations: Vec<usize>,
        column_violations: Vec<usize>,
    },
}

impl QapDecoded {
    pub fn solution(&self) -> Option<&QapSolution> {
        match self {
            QapDecoded::Feasible(s) => Some(s),
            QapDecoded::Infeasible { .. } => None,
        }
    }
}

fn check_perm(n: usize, perm: &[usize]) -> Result<()> {
    let mut seen = vec![false; n];
    if perm.len() != n {
        return Err(FormulationError::NotPermutation(perm.to_vec()));
    }
    for &l in perm {
        if l >= n || seen[l] {
            return Err(FormulationError::NotPermutation(perm.to_vec()));
        }
        seen[l] = true;
    }
    Ok(())
}

pub fn qap_objective(inst: &QapInstance, perm: &[usize]) -> Result<f64> {
    check_perm(inst.n, perm)?;
    let mut total = 0.0;
    for p in 0..inst.n {
        for q in 0..inst.n {
            total += inst.flow(p, q) * inst.cost(perm[p], perm[q]);
        }
    }
    Ok(total)
}

/// `A = 1 + n · max(C_ij T_pq)`.
///
/// With non-negative data every minimizer of the resulting QUBO is a
/// permutation matrix: completing a partial permutation adds at most
/// `(2n-1)·max` to the objective while removing `2A` of penalty.
pub fn qap_default_penalty(inst: &QapInstance) -> f64 {
    let max_c = inst.cost.iter().copied().fold(0.0, f64::max);
    let max_t = inst.flow.iter().copied().fold(0.0, f64::max);
    1.0 + inst.n as f64 * max_c * max_t
}

/// The penalty QUBO over `n²` variables `x(p,i)` (index `p·n + i`):
///
/// `2nA + Σ C_ij T_pq x_pi x_qj + 2A Σ_i Σ_{p<q} x_pi x_qi
///  + 2A Σ_p Σ_{i<j} x_pi x_pj − 2A Σ x_pi`.
pub fn qap_to_qubo(inst: &QapInstance, weights: &PenaltyWeights) -> Result<(Qubo, VarMap)> {
    weights.require_positive(false)?;
    let n = inst.n;
    let a = weights.a;
    let mut map = VarMap::new();
    for p in 0..n {
        for i in 0..n {
            map.push(VarLabel::Assign {
                plant: p,
                location: i,
            });
        }
    }
    let mut b = QuboBuilder::new(n * n);
    b.add_offset(2.0 * n as f64 * a)?;
    for p in 0..n {
        for q in 0..n {
            let t = inst.flow(p, q);
            if t == 0.0 {
                continue;
            }
            for i in 0..n {
                for j in 0..n {
                    let c = inst.cost(i, j);
                    if c != 0.0 {
                        b.add_quadratic(inst.var(p, i), inst.var(q, j), c * t)?;
                    }
                }
            }
        }
    }
    for i in 0..n {
        for p in 0..n {
            b.add_linear(inst.var(p, i), -2.0 * a)?;
            for q in p + 1..n {
                b.add_quadratic(inst.var(p, i), inst.var(q, i), 2.0 * a)?;
            }
            for j in i + 1..n {
                b.add_quadratic(inst.var(p, i), inst.var(p, j), 2.0 * a)?;
            }
        }
    }
    for (i, name) in map.names() {
        b.name(i, name)?;
    }
    Ok((b.build()?, map))
}

pub fn qap_decode(x: &Assignment, map: &VarMap, inst: &QapInstance) -> Result<QapDecoded> {
    let n = inst.n;
    if x.len() != n * n || map.len() != n * n {
        return Err(FormulationError::DimensionMismatch(format!(
            "assignment of length {} for a {n}-facility instance",
            x.len()
        )));
    }
    let mut rows = vec![0usize; n];
    let mut cols = vec![0usize; n];
    let mut perm = vec![usize::MAX; n];
    for (idx, label) in map.labels().iter().enumerate() {
        if let VarLabel::Assign { plant, location } = *label {
            if x.is_set(idx) {
                rows[plant] += 1;
                cols[location] += 1;
                perm[plant] = location;
            }
        }
    }
    let row_violations: Vec<usize> = (0..n).filter(|&p| rows[p] != 1).collect();
    let column_violations: Vec<usize> = (0..n).filter(|&i| cols[i] != 1).collect();
    if row_violations.is_empty() && column_violations.is_empty() {
        let objective = qap_objective(inst, &perm)?;
        Ok(QapDecoded::Feasible(QapSolution { perm, objective }))
    } else {
        Ok(QapDecoded::Infeasible {
            row_violations,
            column_violations,
        })
    }
}

/// Exact optimum by depth-first enumeration of permutations (plants in index
/// order, locations ascending) with bound pruning. The bound adds, for every
/// unplaced plant, its cheapest interaction with the placed ones over the free
/// locations. Ties resolve to the lexicographically smallest permutation.
pub fn qap_oracle(inst: &QapInstance) -> Result<QapSolution> {
    let n = inst.n;
    if n > QAP_ORACLE_MAX_N {
        return Err(FormulationError::TooLarge {
            size: n,
            limit: QAP_ORACLE_MAX_N,
        });
    }
    let mut search = BranchAndBound::new(inst);
    search.descend(0, 0.0);
    let perm = search.best_perm;
    let objective = qap_objective(inst, &perm)?;
    Ok(QapSolution { perm, objective })
}

struct BranchAndBound<'a> {
    inst: &'a QapInstance,
    n: usize,
    perm: Vec<usize>,
    used: Vec<bool>,
    /// `inter[r*n + l]`: cost of plant `r` at location `l` against placed plants,
    /// including its own diagonal term.
    inter: Vec<f64>,
    best: f64,
    best_perm: Vec<usize>,
}

impl<'a> BranchAndBound<'a> {
    fn new(inst: &'a QapInstance) -> Self {
        let n = inst.n;
        let mut inter = vec![0.0; n * n];
        for r in 0..n {
            for l in 0..n {
                inter[r * n + l] = inst.flow(r, r) * inst.cost(l, l);
            }
        }
        Self {
            inst,
            n,
            perm: vec![usize::MAX; n],
            used: vec![false; n],
            inter,
            best: f64::INFINITY,
            best_perm: Vec::new(),
        }
    }

    fn eps(&self) -> f64 {
        if self.best.is_finite() {
            1e-9 * self.best.abs().max(1.0)
        } else {
            0.0
        }
    }

    fn update_inter(&mut self, placed: usize, loc: usize, sign: f64) {
        let n = self.n;
        for r in placed + 1..n {
            let t_rq = self.inst.flow(r, placed);
            let t_qr = self.inst.flow(placed, r);
            if t_rq == 0.0 && t_qr == 0.0 {
                continue;
            }
            for l in 0..n {
                let delta = t_rq * self.inst.cost(l, loc) + t_qr * self.inst.cost(loc, l);
                self.inter[r * n + l] += sign * delta;
            }
        }
    }

    fn lower_bound(&self, depth: usize) -> f64 {
        let n = self.n;
        let mut bound = 0.0;
        for r in depth..n {
            let mut best = f64::INFINITY;
            for l in 0..n {
                if !self.used[l] {
                    best = best.min(self.inter[r * n + l]);
                }
            }
            bound += best;
        }
        bound
    }

    fn descend(&mut self, depth: usize, partial: f64) {
        let n = self.n;
        if depth == n {
            if partial < self.best - self.eps() {
                self.best = partial;
                self.best_perm = self.perm.clone();
            }
            return;
        }
        for loc in 0..n {
            if self.used[loc] {
                continue;
            }
            let cost = partial + self.inter[depth * n + loc];
            self.used[loc] = true;
            self.perm[depth] = loc;
            self.update_inter(depth, loc, 1.0);
            let bound = cost + self.lower_bound(depth + 1);
            if bound < self.best - self.eps() {
                self.descend(depth + 1, cost);
            }
            self.update_inter(depth, loc, -1.0);
            self.used[loc] = false;
        }
        self.perm[depth] = usize::MAX;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two() -> QapInstance {
        QapInstance::new(
            vec![vec![0.0, 1.0], vec![1.0, 0.0]],
            vec![vec![0.0, 3.0], vec![3.0, 0.0]],
        )
        .unwrap()
    }

    #[test]
    fn objective_examples() {
        let one = QapInstance::new(vec![vec![5.0]], vec![vec![2.0]]).unwrap();
        assert_eq!(qap_objective(&one, &[0]).unwrap(), 10.0);
        assert_eq!(qap_objective(&two(), &[0, 1]).unwrap(), 6.0);
        assert_eq!(qap_objective(&two(), &[1, 0]).unwrap(), 6.0);
        assert!(matches!(
            qap_objective(&two(), &[0, 0]),
            Err(FormulationError::NotPermutation(_))
        ));
    }

    #[test]
    fn instance_validation() {
        assert!(QapInstance::new(vec![vec![1.0]], vec![vec![1.0, 2.0]]).is_err());
        assert!(QapInstance::new(vec![vec![-1.0]], vec![vec![1.0]]).is_err());
        assert!(QapInstance::new(vec![], vec![]).is_err());
    }

    #[test]
    fn single_facility_qubo() {
        let inst = QapInstance::new(vec![vec![5.0]], vec![vec![2.0]]).unwrap();
        let (q, map) = qap_to_qubo(&inst, &PenaltyWeights::new(3.0, 0.0)).unwrap();
        assert_eq!(map.len(), 1);
        assert_eq!(q.energy(&"1".parse().unwrap()).unwrap(), 10.0);
        assert_eq!(q.energy(&"0".parse().unwrap()).unwrap(), 6.0);
    }

    #[test]
    fn two_facility_qubo() {
        let (q, map) = qap_to_qubo(&two(), &PenaltyWeights::new(10.0, 0.0)).unwrap();
        assert_eq!(q.num_vars(), 4);
        assert_eq!(q.var_names().unwrap()[&1], "x(1,2)");
        assert_eq!(
            map.index_of(&VarLabel::Assign {
                plant: 1,
                location: 0
            }),
            Some(2)
        );
        assert_eq!(q.energy(&"1001".parse().unwrap()).unwrap(), 6.0);
        assert_eq!(q.energy(&"0110".parse().unwrap()).unwrap(), 6.0);
        assert_eq!(q.energy(&"0000".parse().unwrap()).unwrap(), 40.0);
    }

    #[test]
    fn nonpositive_penalty_rejected() {
        assert!(qap_to_qubo(&two(), &PenaltyWeights::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn default_penalty_examples() {
        assert_eq!(qap_default_penalty(&two()), 7.0);
        let zero = QapInstance::new(vec![vec![0.0; 2]; 2], vec![vec![1.0; 2]; 2]).unwrap();
        assert_eq!(qap_default_penalty(&zero), 1.0);
    }

    #[test]
    fn decode_cases() {
        let inst = two();
        let (_, map) = qap_to_qubo(&inst, &PenaltyWeights::new(10.0, 0.0)).unwrap();
        let d = qap_decode(&"1001".parse().unwrap(), &map, &inst).unwrap();
        assert_eq!(
            d,
            QapDecoded::Feasible(QapSolution {
                perm: vec![0, 1],
                objective: 6.0
            })
        );
        let d = qap_decode(&"0000".parse().unwrap(), &map, &inst).unwrap();
        assert_eq!(
            d,
            QapDecoded::Infeasible {
                row_violations: vec![0, 1],
                column_violations: vec![0, 1]
            }
        );
        // both plants at location 0
        let d = qap_decode(&"1010".parse().unwrap(), &map, &inst).unwrap();
        assert_eq!(
            d,
            QapDecoded::Infeasible {
                row_violations: vec![],
                column_violations: vec![0, 1]
            }
        );
        assert!(qap_decode(&"10".parse().unwrap(), &map, &inst).is_err());
    }

    #[test]
    fn oracle_small_cases() {
        let s = qap_oracle(&two()).unwrap();
        assert_eq!(s.objective, 6.0);
        assert_eq!(s.perm, vec![0, 1]);
        let zero = QapInstance::new(vec![vec![0.0; 3]; 3], vec![vec![4.0; 3]; 3]).unwrap();
        let s = qap_oracle(&zero).unwrap();
        assert_eq!((s.objective, s.perm), (0.0, vec![0, 1, 2]));
        let big = QapInstance::new(vec![vec![0.0; 13]; 13], vec![vec![0.0; 13]; 13]).unwrap();
        assert!(matches!(
            qap_oracle(&big),
            Err(FormulationError::TooLarge { .. })
        ));
    }
}
