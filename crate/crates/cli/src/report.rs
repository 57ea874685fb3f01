use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::{BenchError, Family, Result};

/// One (instance, solver) cell; columns match the CSV header.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub instance: String,
    pub family: Family,
    pub solver: String,
    pub seed: u64,
    pub qubo_energy: f64,
    pub objective: Option<f64>,
    pub feasible: bool,
    pub reference: Option<f64>,
    pub deviation_pct: Option<f64>,
    pub elapsed_s: f64,
}

/// Percentage above `reference`; `None` unless `reference > 0`.
pub fn deviation(objective: f64, reference: f64) -> Option<f64> {
    (reference > 0.0).then(|| 100.0 * (objective - reference) / reference)
}

pub fn write_csv<W: Write>(rows: &[BenchRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record([
            "instance",
            "family",
            "solver",
            "seed",
            "qubo_energy",
            "objective",
            "feasible",
            "reference",
            "deviation_pct",
            "elapsed_s",
        ])?;
    }
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| BenchError::io("<csv output>", e))?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<BenchRow>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .map(|r| r.map_err(BenchError::from))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyStats {
    pub rows: usize,
    pub feasible: usize,
    pub infeasible: usize,
    /// Feasible rows that carry a deviation.
    pub with_deviation: usize,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub mean: Option<f64>,
    pub feasibility_rate: f64,
}

impl fmt::Display for FamilyStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |v| format!("{v:.3}%"));
        write!(
            f,
            "rows {} feasible {} infeasible {} (rate {:.3}) deviation min {} max {} mean {}",
            self.rows,
            self.feasible,
            self.infeasible,
            self.feasibility_rate,
            show(self.min),
            show(self.max),
            show(self.mean)
        )
    }
}

/// Deviation summary per family over feasible rows; infeasible rows are
/// counted, not dropped.
pub fn deviation_stats(rows: &[BenchRow]) -> BTreeMap<Family, FamilyStats> {
    let mut groups: BTreeMap<Family, Vec<&BenchRow>> = BTreeMap::new();
    for r in rows {
        groups.entry(r.family).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|(family, rows)| {
            let feasible = rows.iter().filter(|r| r.feasible).count();
            let devs: Vec<f64> = rows
                .iter()
                .filter(|r| r.feasible)
                .filter_map(|r| r.deviation_pct)
                .collect();
            let stats = FamilyStats {
                rows: rows.len(),
                feasible,
                infeasible: rows.len() - feasible,
                with_deviation: devs.len(),
                min: devs.iter().copied().reduce(f64::min),
                max: devs.iter().copied().reduce(f64::max),
                mean: (!devs.is_empty()).then(|| devs.iter().sum::<f64>() / devs.len() as f64),
                feasibility_rate: feasible as f64 / rows.len() as f64,
            };
            (family, stats)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub family: Family,
    pub bin_start: f64,
    pub bin_end: f64,
    pub count: usize,
}

/// Deviations binned as `[k·width, (k+1)·width)` per family; empty bins
/// between the extremes are kept.
pub fn deviation_histogram(rows: &[BenchRow], width: f64) -> Result<Vec<HistogramBin>> {
    if !(width.is_finite() && width > 0.0) {
        return Err(BenchError::InvalidSpec(format!("bin width {width}")));
    }
    let mut counts: BTreeMap<Family, BTreeMap<i64, usize>> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.feasible) {
        if let Some(d) = r.deviation_pct {
            *counts
                .entry(r.family)
                .or_default()
                .entry((d / width).floor() as i64)
                .or_default() += 1;
        }
    }
    let mut bins = Vec::new();
    for (family, c) in counts {
        let (lo, hi) = (*c.keys().next().unwrap(), *c.keys().next_back().unwrap());
        for k in lo..=hi {
            bins.push(HistogramBin {
                family,
                bin_start: k as f64 * width,
                bin_end: (k + 1) as f64 * width,
                count: c.get(&k).copied().unwrap_or(0),
            });
        }
    }
    Ok(bins)
}

pub fn write_histogram_csv<W: Write>(bins: &[HistogramBin], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if bins.is_empty() {
        w.write_record(["family", "bin_start", "bin_end", "count"])?;
    }
    for b in bins {
        w.serialize(b)?;
    }
    w.flush().map_err(|e| BenchError::io("<csv output>", e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(family: Family, objective: Option<f64>, reference: Option<f64>) -> BenchRow {
        BenchRow {
            instance: "x".into(),
            family,
            solver: "tabu".into(),
            seed: 1,
            qubo_energy: objective.unwrap_or(99.5),
            objective,
            feasible: objective.is_some(),
            reference,
            deviation_pct: objective.zip(reference).and_then(|(o, r)| deviation(o, r)),
            elapsed_s: 0.125,
        }
    }

    #[test]
    fn deviation_examples() {
        assert_eq!(deviation(578.0, 578.0), Some(0.0));
        assert!((deviation(1026.0, 1014.0).unwrap() - 1.183).abs() < 5e-4);
        assert!((deviation(2640.0, 2570.0).unwrap() - 2.724).abs() < 5e-4);
        assert_eq!(deviation(3.0, 0.0), None);
    }

    #[test]
    fn stats_count_infeasible() {
        let rows = vec![
            row(Family::Qap, Some(1026.0), Some(1014.0)),
            row(Family::Qap, None, Some(1014.0)),
            row(Family::Qap, Some(1014.0), Some(1014.0)),
            row(Family::Hens, Some(4.0), None),
        ];
        let s = deviation_stats(&rows);
        let q = &s[&Family::Qap];
        assert_eq!(
            (q.rows, q.feasible, q.infeasible, q.with_deviation),
            (3, 2, 1, 2)
        );
        assert_eq!(q.min, Some(0.0));
        assert!((q.feasibility_rate - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(s[&Family::Hens].mean, None);
        assert!(deviation_stats(&[]).is_empty());
    }

    #[test]
    fn csv_roundtrip() {
        let rows = vec![
            row(Family::Uc, Some(0.1 + 0.2), Some(0.3)),
            row(Family::Qap, None, None),
        ];
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(
            "instance,family,solver,seed,qubo_energy,objective,feasible,reference,deviation_pct,elapsed_s\n"
        ));
        assert_eq!(read_csv(buf.as_slice()).unwrap(), rows);
        let mut empty = Vec::new();
        write_csv(&[], &mut empty).unwrap();
        assert!(read_csv(empty.as_slice()).unwrap().is_empty());
    }

    #[test]
    fn histogram_bins() {
        let rows = vec![
            row(Family::Qap, Some(100.0), Some(100.0)),
            row(Family::Qap, Some(103.5), Some(100.0)),
        ];
        let bins = deviation_histogram(&rows, 1.0).unwrap();
        assert_eq!(bins.len(), 4);
        assert_eq!(
            bins.iter().map(|b| b.count).collect::<Vec<_>>(),
            [1, 0, 0, 1]
        );
        assert!(deviation_histogram(&rows, 0.0).is_err());
    }
}
