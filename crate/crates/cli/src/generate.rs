use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use qubo_energy::formulations::{
    hens_objective, uc_discretize, uc_grid_oracle, HensInstance, HensSolution, UcInstance,
    UcSolution, Unit,
};

use crate::{BenchError, Result};

/// Closed interval to draw from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
}

impl Range {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    fn check(&self, what: &str, min: f64) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite()) || self.lo > self.hi || self.lo < min {
            return Err(BenchError::InvalidSpec(format!(
                "{what} range [{}, {}] must be finite, ordered and at least {min}",
                self.lo, self.hi
            )));
        }
        Ok(())
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        if self.lo == self.hi {
            self.lo
        } else {
            rng.random_range(self.lo..=self.hi)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum GenSpec {
    Uc(UcGenSpec),
    Hens(HensGenSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct UcGenSpec {
    pub units: usize,
    pub grids: usize,
    pub seed: u64,
    pub a: Range,
    pub b: Range,
    pub c: Range,
    pub p_min: Range,
    /// `p_max − p_min` is drawn from these.
    pub spans: Vec<f64>,
}

impl Default for UcGenSpec {
    fn default() -> Self {
        Self {
            units: 3,
            grids: 4,
            seed: 0,
            a: Range::new(0.0, 10.0),
            b: Range::new(0.5, 3.0),
            c: Range::new(0.05, 1.0),
            p_min: Range::new(0.5, 2.0),
            spans: vec![1.0, 2.0, 4.0, 8.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HensGenSpec {
    pub sources: usize,
    pub sinks: usize,
    pub grids: usize,
    pub seed: u64,
    /// Integer match costs are drawn uniformly from `cost_lo..=cost_hi`.
    pub cost_lo: u32,
    pub cost_hi: u32,
}

impl Default for HensGenSpec {
    fn default() -> Self {
        Self {
            sources: 3,
            sinks: 3,
            grids: 4,
            seed: 0,
            cost_lo: 1,
            cost_hi: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedUc {
    pub instance: UcInstance,
    /// Optimum over the generator's grid; proves the load is reachable.
    pub witness: UcSolution,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedHens {
    pub instance: HensInstance,
    /// The hidden flow the loads were built from.
    pub witness: HensSolution,
}

/// Random UC instance. `p_min` is rounded to a multiple of `1/grids` and
/// the load drawn from `[max p_min, 0.8·Σ p_max]` is snapped to the nearest
/// total reachable on the `grids`-point grid, so the instance has a feasible
/// grid commitment.
pub fn gen_uc(spec: &UcGenSpec) -> Result<GeneratedUc> {
    if spec.units == 0 || spec.grids == 0 {
        return Err(BenchError::InvalidSpec(
            "units and grids must be at least 1".into(),
        ));
    }
    spec.a.check("a", 0.0)?;
    spec.b.check("b", 0.0)?;
    spec.c.check("c", 0.0)?;
    spec.p_min.check("p_min", 0.0)?;
    if spec.spans.is_empty() || spec.spans.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
        return Err(BenchError::InvalidSpec("spans must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let grid = spec.grids as f64;
    let units: Vec<Unit> = (0..spec.units)
        .map(|_| {
            let a = spec.a.draw(&mut rng);
            let b = spec.b.draw(&mut rng);
            let c = spec.c.draw(&mut rng);
            let p_min = (spec.p_min.draw(&mut rng) * grid).round() / grid;
            let span = *spec.spans.choose(&mut rng).expect("nonempty");
            Unit {
                a,
                b,
                c,
                p_min,
                p_max: p_min + span,
            }
        })
        .collect();
    let lo = units.iter().map(|u| u.p_min).fold(0.0, f64::max);
    let hi = (0.8 * units.iter().map(|u| u.p_max).sum::<f64>()).max(lo);
    let target = Range::new(lo, hi).draw(&mut rng);

    let probe = uc_discretize(&UcInstance::new(units.clone(), 0.0)?, spec.grids)?;
    let load = probe
        .achievable_loads()?
        .into_iter()
        .filter(|&s| s > 0.0)
        .min_by(|x, y| (x - target).abs().total_cmp(&(y - target).abs()))
        .expect("every unit has a positive grid point");
    let instance = UcInstance::new(units, load)?;
    let witness = uc_grid_oracle(&uc_discretize(&instance, spec.grids)?)?;
    Ok(GeneratedUc { instance, witness })
}

fn divisors(n: usize) -> Vec<usize> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

const HENS_BALANCE_ATTEMPTS: usize = 10_000;

/// Random balanced HENS instance. Every load is `N·d` for a divisor `d` of
/// `N`, so any flow in multiples of `N` lies on the `N`-point grid of every
/// match. The witness is the north-west-corner flow over shuffled source and
/// sink orders.
pub fn gen_hens(spec: &HensGenSpec) -> Result<GeneratedHens> {
    let (m, n, grids) = (spec.sources, spec.sinks, spec.grids);
    if m == 0 || n == 0 || grids == 0 {
        return Err(BenchError::InvalidSpec(
            "sources, sinks and grids must be at least 1".into(),
        ));
    }
    if spec.cost_lo > spec.cost_hi {
        return Err(BenchError::InvalidSpec("cost range is empty".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let values: Vec<usize> = divisors(grids).into_iter().map(|d| d * grids).collect();

    let mut loads = None;
    for _ in 0..HENS_BALANCE_ATTEMPTS {
        let supply: Vec<usize> = (0..m)
            .map(|_| *values.choose(&mut rng).expect("nonempty"))
            .collect();
        let mut demand: Vec<usize> = (0..n - 1)
            .map(|_| *values.choose(&mut rng).expect("nonempty"))
            .collect();
        let rest = supply.iter().sum::<usize>() as i64 - demand.iter().sum::<usize>() as i64;
        if rest > 0 && values.contains(&(rest as usize)) {
            demand.push(rest as usize);
            loads = Some((supply, demand));
            break;
        }
    }
    let (supply, demand) = loads.ok_or_else(|| {
        BenchError::InvalidSpec(format!("could not balance {m} sources against {n} sinks"))
    })?;
    let cost: Vec<Vec<f64>> = (0..m)
        .map(|_| {
            (0..n)
                .map(|_| rng.random_range(spec.cost_lo..=spec.cost_hi) as f64)
                .collect()
        })
        .collect();

    let mut rows: Vec<usize> = (0..m).collect();
    let mut cols: Vec<usize> = (0..n).collect();
    rows.shuffle(&mut rng);
    cols.shuffle(&mut rng);
    let (mut left_s, mut left_d) = (supply.clone(), demand.clone());
    let mut q = vec![vec![0.0; n]; m];
    let mut w = vec![vec![false; n]; m];
    let (mut r, mut c) = (0, 0);
    while r < m && c < n {
        let (i, j) = (rows[r], cols[c]);
        let amount = left_s[i].min(left_d[j]);
        if amount > 0 {
            q[i][j] = amount as f64;
            w[i][j] = true;
        }
        left_s[i] -= amount;
        left_d[j] -= amount;
        if left_s[i] == 0 {
            r += 1;
        }
        if left_d[j] == 0 {
            c += 1;
        }
    }

    let to_f = |v: &[usize]| v.iter().map(|&x| x as f64).collect::<Vec<_>>();
    let instance = HensInstance::new(to_f(&supply), to_f(&demand), cost)?;
    let witness = hens_objective(&instance, &w, &q)?;
    if !witness.is_feasible() {
        return Err(BenchError::Invariant(format!(
            "hidden flow violates {:?}",
            witness.violations
        )));
    }
    Ok(GeneratedHens { instance, witness })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uc_load_is_grid_reachable() {
        for seed in 0..20 {
            let g = gen_uc(&UcGenSpec {
                seed,
                ..UcGenSpec::default()
            })
            .unwrap();
            assert!(g.witness.is_feasible());
            let u = g.instance.units();
            assert!(u.iter().all(|u| u.c >= 0.05 && u.p_min < u.p_max));
            assert!(g.instance.load() > 0.0);
        }
    }

    #[test]
    fn hens_loads_are_grid_multiples() {
        let g = gen_hens(&HensGenSpec {
            seed: 3,
            ..HensGenSpec::default()
        })
        .unwrap();
        for &v in g.instance.supply().iter().chain(g.instance.demand()) {
            assert!([4.0, 8.0, 16.0].contains(&v), "{v}");
        }
        assert!(g.witness.is_feasible());
    }

    #[test]
    fn rejects_bad_ranges() {
        let spec = UcGenSpec {
            c: Range::new(-1.0, 1.0),
            ..UcGenSpec::default()
        };
        assert!(gen_uc(&spec).is_err());
        let spec = UcGenSpec {
            a: Range::new(2.0, 1.0),
            ..UcGenSpec::default()
        };
        assert!(gen_uc(&spec).is_err());
        let spec = HensGenSpec {
            sinks: 0,
            ..HensGenSpec::default()
        };
        assert!(gen_hens(&spec).is_err());
    }
}
