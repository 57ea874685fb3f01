//! Binary quadratic models, their Ising counterparts, penalty expansion and
//! variable clamping.
//!
//! A [`Qubo`] is stored sparsely and canonically: quadratic keys are ordered
//! pairs `(i, j)` with `i < j`, diagonal terms are folded into the linear part
//! (`x * x == x` for binary `x`), duplicate keys are summed and exact zeros
//! are dropped. Two models describing the same energy function through the
//! same terms therefore compare equal structurally.
//!
//! Spins relate to bits by `s = 1 - 2x`, so bit `0` is spin `+1`.

mod assignment;
mod clamp;
mod ising;
mod json;

use std::collections::BTreeMap;

use thiserror::Error;

pub use assignment::Assignment;
pub use clamp::Clamped;
pub use ising::{ising_to_qubo, qubo_to_ising, IsingModel};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuboError {
    #[error("variable index {index} out of range for a model with {num_vars} variables")]
    IndexOutOfRange { index: usize, num_vars: usize },
    #[error("non-finite coefficient {value} on {term}")]
    NonFinite { term: String, value: f64 },
    #[error("assignment has length {got}, model has {expected} variables")]
    LengthMismatch { expected: usize, got: usize },
    #[error("bit value {0} is not 0 or 1")]
    InvalidBit(u8),
    #[error("spin value {0} is not -1 or +1")]
    InvalidSpin(i8),
    #[error("penalty weight must be non-negative and finite, got {0}")]
    InvalidWeight(f64),
    #[error("cannot parse assignment: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, QuboError>;

/// A quadratic pseudo-boolean function `offset + Σ a_i x_i + Σ_{i<j} b_ij x_i x_j`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Qubo {
    num_vars: usize,
    linear: BTreeMap<usize, f64>,
    quadratic: BTreeMap<(usize, usize), f64>,
    offset: f64,
    var_names: Option<BTreeMap<usize, String>>,
}

impl Qubo {
    /// Builds a canonical model from raw term lists.
    ///
    /// Duplicate keys are summed, `(i, i)` quadratic entries are folded into
    /// the linear coefficient of `i`, and `(j, i)` is stored as `(i, j)`.
    pub fn new<L, Q>(num_vars: usize, linear: L, quadratic: Q, offset: f64) -> Result<Self>
    where
        L: IntoIterator<Item = (usize, f64)>,
        Q: IntoIterator<Item = ((usize, usize), f64)>,
    {
        let mut builder = QuboBuilder::new(num_vars);
        for (i, v) in linear {
            builder.add_linear(i, v)?;
        }
        for ((i, j), v) in quadratic {
            builder.add_quadratic(i, j, v)?;
        }
        builder.add_offset(offset)?;
        builder.build()
    }

    /// A model over `num_vars` variables with every coefficient zero.
    pub fn zero(num_vars: usize) -> Self {
        Self {
            num_vars,
            ..Self::default()
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn linear(&self) -> &BTreeMap<usize, f64> {
        &self.linear
    }

    pub fn quadratic(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.quadratic
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn var_names(&self) -> Option<&BTreeMap<usize, String>> {
        self.var_names.as_ref()
    }

    /// Linear coefficient of `i` (zero when absent).
    pub fn linear_coef(&self, i: usize) -> f64 {
        self.linear.get(&i).copied().unwrap_or(0.0)
    }

    /// Coupling between `i` and `j` in either order (zero when absent or `i == j`).
    pub fn quadratic_coef(&self, i: usize, j: usize) -> f64 {
        let key = if i < j { (i, j) } else { (j, i) };
        self.quadratic.get(&key).copied().unwrap_or(0.0)
    }

    /// Attaches human-readable labels. Indices must be in range.
    pub fn with_var_names(mut self, names: BTreeMap<usize, String>) -> Result<Self> {
        if let Some(&index) = names.keys().find(|&&i| i >= self.num_vars) {
            return Err(QuboError::IndexOutOfRange {
                index,
                num_vars: self.num_vars,
            });
        }
        self.var_names = Some(names);
        Ok(self)
    }

    pub fn energy(&self, x: &Assignment) -> Result<f64> {
        self.check_len(x.len())?;
        Ok(self.energy_bits(x.bits()))
    }

    /// Energy of a raw bit slice. The caller guarantees the length and that
    /// every entry is 0 or 1.
    pub(crate) fn energy_bits(&self, bits: &[u8]) -> f64 {
        debug_assert_eq!(bits.len(), self.num_vars);
        let mut e = self.offset;
        for (&i, &a) in &self.linear {
            if bits[i] == 1 {
                e += a;
            }
        }
        for (&(i, j), &b) in &self.quadratic {
            if bits[i] == 1 && bits[j] == 1 {
                e += b;
            }
        }
        e
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<()> {
        if len != self.num_vars {
            return Err(QuboError::LengthMismatch {
                expected: self.num_vars,
                got: len,
            });
        }
        Ok(())
    }

    /// Coefficient-wise sum of two models over the same variables.
    pub fn plus(&self, other: &Qubo) -> Result<Qubo> {
        self.check_len(other.num_vars)?;
        let mut builder = QuboBuilder::from_qubo(self);
        for (&i, &a) in &other.linear {
            builder.add_linear(i, a)?;
        }
        for (&(i, j), &b) in &other.quadratic {
            builder.add_quadratic(i, j, b)?;
        }
        builder.add_offset(other.offset)?;
        builder.build()
    }

    /// Returns `self + weight * expr²`, expanded with `x² = x`.
    pub fn add_squared_penalty(&self, expr: &LinearExpr, weight: f64) -> Result<Qubo> {
        let mut builder = QuboBuilder::from_qubo(self);
        builder.add_squared_penalty(expr, weight)?;
        builder.build()
    }

    /// Rounds every coefficient (and the offset) to `significant_bits` bits of
    /// mantissa. Emulates limited coefficient precision on annealing hardware.
    pub fn quantized(&self, significant_bits: u32) -> Qubo {
        let round = |v: f64| round_significant(v, significant_bits);
        let mut out = Qubo {
            num_vars: self.num_vars,
            linear: BTreeMap::new(),
            quadratic: BTreeMap::new(),
            offset: round(self.offset),
            var_names: self.var_names.clone(),
        };
        for (&i, &a) in &self.linear {
            let a = round(a);
            if a != 0.0 {
                out.linear.insert(i, a);
            }
        }
        for (&k, &b) in &self.quadratic {
            let b = round(b);
            if b != 0.0 {
                out.quadratic.insert(k, b);
            }
        }
        out
    }

    /// Largest absolute coefficient over linear and quadratic terms.
    pub fn max_abs_coefficient(&self) -> f64 {
        self.linear
            .values()
            .chain(self.quadratic.values())
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

fn round_significant(v: f64, bits: u32) -> f64 {
    if v == 0.0 || !v.is_finite() || bits == 0 {
        return v;
    }
    let exp = v.abs().log2().floor();
    let scale = (bits as f64 - 1.0 - exp).exp2();
    (v * scale).round() / scale
}

/// An affine expression `constant + Σ c_i x_i`, used to build squared penalties.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinearExpr {
    terms: BTreeMap<usize, f64>,
    constant: f64,
}

impl LinearExpr {
    pub fn constant(constant: f64) -> Self {
        Self {
            terms: BTreeMap::new(),
            constant,
        }
    }

    /// Adds `coef * x_index`, merging with an existing term.
    pub fn term(mut self, index: usize, coef: f64) -> Self {
        self.push(index, coef);
        self
    }

    pub fn push(&mut self, index: usize, coef: f64) {
        *self.terms.entry(index).or_insert(0.0) += coef;
    }

    pub fn terms(&self) -> &BTreeMap<usize, f64> {
        &self.terms
    }

    pub fn constant_term(&self) -> f64 {
        self.constant
    }

    pub fn evaluate(&self, bits: &[u8]) -> f64 {
        self.terms
            .iter()
            .filter(|(&i, _)| bits[i] == 1)
            .fold(self.constant, |acc, (_, &c)| acc + c)
    }
}

/// Mutable accumulator for model terms; [`QuboBuilder::build`] canonicalizes.
#[derive(Debug, Clone)]
pub struct QuboBuilder {
    num_vars: usize,
    linear: BTreeMap<usize, f64>,
    quadratic: BTreeMap<(usize, usize), f64>,
    offset: f64,
    var_names: BTreeMap<usize, String>,
}

impl QuboBuilder {
    pub fn new(num_vars: usize) -> Self {
        Self {
            num_vars,
            linear: BTreeMap::new(),
            quadratic: BTreeMap::new(),
            offset: 0.0,
            var_names: BTreeMap::new(),
        }
    }

    pub fn from_qubo(q: &Qubo) -> Self {
        Self {
            num_vars: q.num_vars,
            linear: q.linear.clone(),
            quadratic: q.quadratic.clone(),
            offset: q.offset,
            var_names: q.var_names.clone().unwrap_or_default(),
        }
    }

    fn check_index(&self, index: usize) -> Result<()> {
        if index >= self.num_vars {
            return Err(QuboError::IndexOutOfRange {
                index,
                num_vars: self.num_vars,
            });
        }
        Ok(())
    }

    fn check_finite(term: impl FnOnce() -> String, value: f64) -> Result<()> {
        if !value.is_finite() {
            return Err(QuboError::NonFinite {
                term: term(),
                value,
            });
        }
        Ok(())
    }

    pub fn add_linear(&mut self, i: usize, value: f64) -> Result<&mut Self> {
        self.check_index(i)?;
        Self::check_finite(|| format!("linear {i}"), value)?;
        *self.linear.entry(i).or_insert(0.0) += value;
        Ok(self)
    }

    pub fn add_quadratic(&mut self, i: usize, j: usize, value: f64) -> Result<&mut Self> {
        self.check_index(i)?;
        self.check_index(j)?;
        Self::check_finite(|| format!("quadratic ({i}, {j})"), value)?;
        if i == j {
            *self.linear.entry(i).or_insert(0.0) += value;
        } else {
            let key = if i < j { (i, j) } else { (j, i) };
            *self.quadratic.entry(key).or_insert(0.0) += value;
        }
        Ok(self)
    }

    pub fn add_offset(&mut self, value: f64) -> Result<&mut Self> {
        Self::check_finite(|| "offset".to_string(), value)?;
        self.offset += value;
        Ok(self)
    }

    pub fn name(&mut self, i: usize, label: impl Into<String>) -> Result<&mut Self> {
        self.check_index(i)?;
        self.var_names.insert(i, label.into());
        Ok(self)
    }

    /// Adds `weight * (Σ c_i x_i + k)²` expanded with `x² = x`:
    /// linear `weight (c_i² + 2 c_i k)`, pairs `2 weight c_i c_j`, offset `weight k²`.
    pub fn add_squared_penalty(&mut self, expr: &LinearExpr, weight: f64) -> Result<&mut Self> {
        if !weight.is_finite() || weight < 0.0 {
            return Err(QuboError::InvalidWeight(weight));
        }
        for &i in expr.terms.keys() {
            self.check_index(i)?;
        }
        let k = expr.constant;
        let terms: Vec<(usize, f64)> = expr
            .terms
            .iter()
            .filter(|(_, &c)| c != 0.0)
            .map(|(&i, &c)| (i, c))
            .collect();
        for (a, &(i, ci)) in terms.iter().enumerate() {
            self.add_linear(i, weight * (ci * ci + 2.0 * ci * k))?;
            for &(j, cj) in &terms[a + 1..] {
                self.add_quadratic(i, j, 2.0 * weight * ci * cj)?;
            }
        }
        self.add_offset(weight * k * k)?;
        Ok(self)
    }

    pub fn build(self) -> Result<Qubo> {
        Self::check_finite(|| "offset".to_string(), self.offset)?;
        let mut linear = BTreeMap::new();
        for (i, v) in self.linear {
            Self::check_finite(|| format!("linear {i}"), v)?;
            if v != 0.0 {
                linear.insert(i, v);
            }
        }
        let mut quadratic = BTreeMap::new();
        for ((i, j), v) in self.quadratic {
            Self::check_finite(|| format!("quadratic ({i}, {j})"), v)?;
            if v != 0.0 {
                quadratic.insert((i, j), v);
            }
        }
        Ok(Qubo {
            num_vars: self.num_vars,
            linear,
            quadratic,
            offset: self.offset,
            var_names: (!self.var_names.is_empty()).then_some(self.var_names),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Qubo {
        Qubo::new(2, [(0, 1.0), (1, 2.0)], [((0, 1), -4.0)], 0.0).unwrap()
    }

    fn bits(s: &str) -> Assignment {
        s.parse().unwrap()
    }

    #[test]
    fn empty_model_has_zero_energy() {
        let q = Qubo::new(0, [], [], 0.0).unwrap();
        assert_eq!(q.energy(&Assignment::zeros(0)).unwrap(), 0.0);
    }

    #[test]
    fn hand_arithmetic_energy() {
        let q = sample();
        assert_eq!(q.energy(&bits("11")).unwrap(), -1.0);
        assert_eq!(q.energy(&bits("00")).unwrap(), 0.0);
    }

    #[test]
    fn diagonal_folds_into_linear() {
        let q = Qubo::new(2, [], [((1, 1), 3.0)], 0.0).unwrap();
        assert_eq!(q.linear().get(&1), Some(&3.0));
        assert!(q.quadratic().is_empty());
    }

    #[test]
    fn duplicates_merge_and_zeros_drop() {
        let q = Qubo::new(
            3,
            [(0, 1.0), (0, -1.0)],
            [((2, 1), 2.0), ((1, 2), 0.5)],
            0.0,
        )
        .unwrap();
        assert!(q.linear().is_empty());
        assert_eq!(q.quadratic().get(&(1, 2)), Some(&2.5));
    }

    #[test]
    fn rejects_out_of_range_and_non_finite() {
        assert!(matches!(
            Qubo::new(2, [(2, 1.0)], [], 0.0),
            Err(QuboError::IndexOutOfRange { index: 2, .. })
        ));
        assert!(matches!(
            Qubo::new(2, [], [((0, 1), f64::NAN)], 0.0),
            Err(QuboError::NonFinite { .. })
        ));
        assert!(Qubo::new(2, [], [], f64::INFINITY).is_err());
    }

    #[test]
    fn energy_length_mismatch() {
        assert!(matches!(
            sample().energy(&bits("1")),
            Err(QuboError::LengthMismatch {
                expected: 2,
                got: 1
            })
        ));
    }

    #[test]
    fn penalty_one_hot_pair() {
        let a = 7.0;
        let expr = LinearExpr::constant(-1.0).term(0, 1.0).term(1, 1.0);
        let q = Qubo::zero(2).add_squared_penalty(&expr, a).unwrap();
        assert_eq!(q.linear().get(&0), Some(&-a));
        assert_eq!(q.linear().get(&1), Some(&-a));
        assert_eq!(q.quadratic().get(&(0, 1)), Some(&(2.0 * a)));
        assert_eq!(q.offset(), a);
        assert_eq!(q.energy(&bits("10")).unwrap(), 0.0);
        assert_eq!(q.energy(&bits("11")).unwrap(), a);
    }

    #[test]
    fn penalty_zero_expression_is_identity() {
        let q = sample();
        assert_eq!(
            q.add_squared_penalty(&LinearExpr::constant(0.0), 3.0)
                .unwrap(),
            q
        );
    }

    #[test]
    fn penalty_single_variable() {
        let expr = LinearExpr::constant(-1.0).term(0, 1.0);
        let q = Qubo::zero(1).add_squared_penalty(&expr, 5.0).unwrap();
        assert_eq!(q.linear().get(&0), Some(&-5.0));
        assert_eq!(q.offset(), 5.0);
        assert_eq!(q.energy(&bits("1")).unwrap(), 0.0);
    }

    #[test]
    fn penalty_rejects_negative_weight_and_bad_index() {
        let expr = LinearExpr::constant(1.0).term(0, 1.0);
        assert!(matches!(
            Qubo::zero(1).add_squared_penalty(&expr, -1.0),
            Err(QuboError::InvalidWeight(_))
        ));
        let expr = LinearExpr::constant(1.0).term(4, 1.0);
        assert!(Qubo::zero(1).add_squared_penalty(&expr, 1.0).is_err());
    }

    #[test]
    fn quantization_rounds_to_significant_bits() {
        let q = Qubo::new(1, [(0, 0.3)], [], 5.0).unwrap().quantized(2);
        // 0.3 lies in [0.25, 0.5): quantum 0.125
        assert_eq!(q.linear().get(&0), Some(&0.25));
        // 5 in [4, 8): quantum 2, ties round away from zero
        assert_eq!(q.offset(), 6.0);
        assert_eq!(sample().quantized(53), sample());
    }

    #[test]
    fn plus_adds_coefficientwise() {
        let q = sample();
        let r = q.plus(&q).unwrap();
        assert_eq!(r.energy(&bits("11")).unwrap(), -2.0);
        assert!(q.plus(&Qubo::zero(3)).is_err());
    }
}
