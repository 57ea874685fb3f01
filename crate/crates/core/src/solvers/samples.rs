use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::qubo::{Assignment, Qubo, QuboError};

use super::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct SampleRecord {
    pub assignment: Assignment,
    pub energy: f64,
    pub occurrences: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleMeta {
    pub solver: String,
    pub seed: u64,
    pub reads: usize,
    /// Wall time; excluded from the canonical form.
    pub elapsed_s: f64,
}

impl SampleMeta {
    pub fn new(solver: &str, seed: u64, reads: usize) -> Self {
        Self {
            solver: solver.to_string(),
            seed,
            reads,
            elapsed_s: 0.0,
        }
    }
}

/// Distinct assignments with multiplicities, sorted by energy then bits.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    records: Vec<SampleRecord>,
    pub meta: SampleMeta,
}

fn record_order(a: &SampleRecord, b: &SampleRecord) -> Ordering {
    a.energy
        .total_cmp(&b.energy)
        .then_with(|| a.assignment.cmp(&b.assignment))
}

impl SampleSet {
    /// Aggregates raw samples, evaluating every energy on `model`.
    pub fn from_samples<I>(model: &Qubo, samples: I, meta: SampleMeta) -> Result<Self>
    where
        I: IntoIterator<Item = Vec<u8>>,
    {
        let mut counts: BTreeMap<Vec<u8>, usize> = BTreeMap::new();
        for bits in samples {
            model.check_len(bits.len())?;
            if let Some(&b) = bits.iter().find(|&&b| b > 1) {
                return Err(QuboError::InvalidBit(b).into());
            }
            *counts.entry(bits).or_default() += 1;
        }
        let records = counts
            .into_iter()
            .map(|(bits, occurrences)| SampleRecord {
                energy: model.energy_bits(&bits),
                assignment: Assignment::from_bits_unchecked(bits),
                occurrences,
            })
            .collect();
        Ok(Self::from_records(records, meta))
    }

    fn from_records(mut records: Vec<SampleRecord>, meta: SampleMeta) -> Self {
        records.sort_by(record_order);
        Self { records, meta }
    }

    pub fn records(&self) -> &[SampleRecord] {
        &self.records
    }

    pub fn best(&self) -> Option<&SampleRecord> {
        self.records.first()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn total_occurrences(&self) -> usize {
        self.records.iter().map(|r| r.occurrences).sum()
    }

    /// Union of both sets; identical assignments have their counts summed.
    /// Meta is taken from `self` with reads added.
    pub fn merge(&self, other: &SampleSet) -> SampleSet {
        let mut by_bits: BTreeMap<&Assignment, SampleRecord> = BTreeMap::new();
        for r in self.records.iter().chain(&other.records) {
            by_bits
                .entry(&r.assignment)
                .and_modify(|e| e.occurrences += r.occurrences)
                .or_insert_with(|| r.clone());
        }
        let mut meta = self.meta.clone();
        meta.reads += other.meta.reads;
        meta.elapsed_s += other.meta.elapsed_s;
        Self::from_records(by_bits.into_values().collect(), meta)
    }

    /// Largest relative discrepancy between stored and recomputed energies.
    pub fn max_energy_error(&self, model: &Qubo) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for r in &self.records {
            let e = model.energy(&r.assignment)?;
            worst = worst.max((e - r.energy).abs() / e.abs().max(1.0));
        }
        Ok(worst)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("sample sets always serialize")
    }

    /// JSON without wall time, for byte-level reproducibility checks.
    pub fn canonical_json(&self) -> String {
        let mut copy = self.clone();
        copy.meta.elapsed_s = 0.0;
        let mut doc = SampleSetDoc::from(&copy);
        doc.meta.elapsed_s = None;
        serde_json::to_string(&doc).expect("sample sets always serialize")
    }
}

#[derive(Serialize, Deserialize)]
struct MetaDoc {
    solver: String,
    seed: u64,
    reads: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    elapsed_s: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct RecordDoc {
    bits: String,
    energy: f64,
    occurrences: usize,
}

#[derive(Serialize, Deserialize)]
struct SampleSetDoc {
    meta: MetaDoc,
    records: Vec<RecordDoc>,
}

impl From<&SampleSet> for SampleSetDoc {
    fn from(s: &SampleSet) -> Self {
        Self {
            meta: MetaDoc {
                solver: s.meta.solver.clone(),
                seed: s.meta.seed,
                reads: s.meta.reads,
                elapsed_s: Some(s.meta.elapsed_s),
            },
            records: s
                .records
                .iter()
                .map(|r| RecordDoc {
                    bits: r.assignment.to_string(),
                    energy: r.energy,
                    occurrences: r.occurrences,
                })
                .collect(),
        }
    }
}

impl Serialize for SampleSet {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        SampleSetDoc::from(self).serialize(ser)
    }
}

impl<'de> Deserialize<'de> for SampleSet {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let doc = SampleSetDoc::deserialize(de)?;
        let records = doc
            .records
            .into_iter()
            .map(|r| {
                Ok(SampleRecord {
                    assignment: r.bits.parse().map_err(serde::de::Error::custom)?,
                    energy: r.energy,
                    occurrences: r.occurrences,
                })
            })
            .collect::<std::result::Result<Vec<_>, D::Error>>()?;
        let meta = SampleMeta {
            solver: doc.meta.solver,
            seed: doc.meta.seed,
            reads: doc.meta.reads,
            elapsed_s: doc.meta.elapsed_s.unwrap_or(0.0),
        };
        Ok(SampleSet::from_records(records, meta))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model() -> Qubo {
        Qubo::new(2, [(0, -1.0), (1, -1.0)], [((0, 1), 2.0)], 0.0).unwrap()
    }

    #[test]
    fn aggregates_and_sorts() {
        let s = SampleSet::from_samples(
            &model(),
            vec![vec![1, 1], vec![0, 1], vec![1, 0], vec![0, 1]],
            SampleMeta::new("test", 1, 4),
        )
        .unwrap();
        let bits: Vec<String> = s
            .records()
            .iter()
            .map(|r| r.assignment.to_string())
            .collect();
        assert_eq!(bits, ["01", "10", "11"]);
        assert_eq!(s.records()[0].occurrences, 2);
        assert_eq!(s.best().unwrap().energy, -1.0);
        assert_eq!(s.total_occurrences(), 4);
    }

    #[test]
    fn merge_sums_occurrences() {
        let m = model();
        let a =
            SampleSet::from_samples(&m, vec![vec![0, 1], vec![0, 0]], SampleMeta::new("a", 0, 2))
                .unwrap();
        let b =
            SampleSet::from_samples(&m, vec![vec![0, 1], vec![1, 0]], SampleMeta::new("b", 0, 2))
                .unwrap();
        let c = a.merge(&b);
        assert_eq!(c.meta.reads, 4);
        assert_eq!(c.records()[0].occurrences, 2);
        assert_eq!(c.len(), 3);
        assert_eq!(c.records().last().unwrap().assignment.to_string(), "00");
    }

    #[test]
    fn rejects_bad_samples() {
        assert!(
            SampleSet::from_samples(&model(), vec![vec![0]], SampleMeta::new("t", 0, 1)).is_err()
        );
        assert!(
            SampleSet::from_samples(&model(), vec![vec![0, 2]], SampleMeta::new("t", 0, 1))
                .is_err()
        );
    }

    #[test]
    fn json_roundtrip() {
        let mut s =
            SampleSet::from_samples(&model(), vec![vec![1, 0]], SampleMeta::new("sa", 7, 1))
                .unwrap();
        s.meta.elapsed_s = 0.25;
        let text = s.to_json();
        assert!(text.contains(r#""bits":"10""#));
        let back: SampleSet = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
        assert!(!s.canonical_json().contains("elapsed_s"));
    }
}
