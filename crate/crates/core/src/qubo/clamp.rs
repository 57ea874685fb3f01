use std::collections::BTreeMap;

use super::{Assignment, Qubo, QuboBuilder, QuboError, Result};

/// A model restricted to its free variables, with the fixed ones folded in.
#[derive(Debug, Clone, PartialEq)]
pub struct Clamped {
    /// Model over the free variables only; index `k` is original `free[k]`.
    pub model: Qubo,
    /// Reduced index → original index, ascending.
    pub free: Vec<usize>,
    fixed: BTreeMap<usize, u8>,
    full_len: usize,
}

impl Clamped {
    pub fn fixed(&self) -> &BTreeMap<usize, u8> {
        &self.fixed
    }

    /// Combines an assignment of the free variables with the fixed values.
    pub fn expand(&self, reduced: &Assignment) -> Result<Assignment> {
        self.model.check_len(reduced.len())?;
        let mut bits = vec![0u8; self.full_len];
        for (&i, &b) in &self.fixed {
            bits[i] = b;
        }
        for (k, &i) in self.free.iter().enumerate() {
            bits[i] = reduced.bits()[k];
        }
        Ok(Assignment::from_bits_unchecked(bits))
    }

    /// Restricts a full assignment to the free variables.
    pub fn restrict(&self, full: &[u8]) -> Assignment {
        Assignment::from_bits_unchecked(self.free.iter().map(|&i| full[i]).collect())
    }
}

impl Qubo {
    /// Fixes the variables in `fixed` and returns the model over the rest.
    ///
    /// For every assignment `y` of the free variables,
    /// `reduced.energy(y) == self.energy(y ∪ fixed)`.
    pub fn clamp(&self, fixed: &BTreeMap<usize, u8>) -> Result<Clamped> {
        for (&i, &b) in fixed {
            if i >= self.num_vars() {
                return Err(QuboError::IndexOutOfRange {
                    index: i,
                    num_vars: self.num_vars(),
                });
            }
            if b > 1 {
                return Err(QuboError::InvalidBit(b));
            }
        }
        let mut reduced_index = vec![usize::MAX; self.num_vars()];
        let free: Vec<usize> = (0..self.num_vars())
            .filter(|i| !fixed.contains_key(i))
            .collect();
        for (k, &i) in free.iter().enumerate() {
            reduced_index[i] = k;
        }

        let mut builder = QuboBuilder::new(free.len());
        builder.add_offset(self.offset())?;
        for (&i, &a) in self.linear() {
            match fixed.get(&i) {
                Some(&1) => {
                    builder.add_offset(a)?;
                }
                Some(_) => {}
                None => {
                    builder.add_linear(reduced_index[i], a)?;
                }
            }
        }
        for (&(i, j), &b) in self.quadratic() {
            match (fixed.get(&i), fixed.get(&j)) {
                (None, None) => {
                    builder.add_quadratic(reduced_index[i], reduced_index[j], b)?;
                }
                (Some(&1), None) => {
                    builder.add_linear(reduced_index[j], b)?;
                }
                (None, Some(&1)) => {
                    builder.add_linear(reduced_index[i], b)?;
                }
                (Some(&1), Some(&1)) => {
                    builder.add_offset(b)?;
                }
                _ => {}
            }
        }
        if let Some(names) = self.var_names() {
            for (k, &i) in free.iter().enumerate() {
                if let Some(name) = names.get(&i) {
                    builder.name(k, name.clone())?;
                }
            }
        }
        Ok(Clamped {
            model: builder.build()?,
            free,
            fixed: fixed.clone(),
            full_len: self.num_vars(),
        })
    }
}
