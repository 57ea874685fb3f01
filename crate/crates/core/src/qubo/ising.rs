use std::collections::BTreeMap;

use super::{Qubo, QuboBuilder, QuboError, Result};

/// `offset + Σ h_i s_i + Σ_{i<j} J_ij s_i s_j` over spins `s_i ∈ {-1, +1}`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IsingModel {
    num_vars: usize,
    h: BTreeMap<usize, f64>,
    j: BTreeMap<(usize, usize), f64>,
    offset: f64,
}

impl IsingModel {
    /// Builds a canonical model; the same folding rules as [`Qubo::new`]
    /// apply, except that a diagonal coupling `J_ii s_i s_i = J_ii` is a constant.
    pub fn new<H, J>(num_vars: usize, h: H, j: J, offset: f64) -> Result<Self>
    where
        H: IntoIterator<Item = (usize, f64)>,
        J: IntoIterator<Item = ((usize, usize), f64)>,
    {
        let mut out = IsingModel {
            num_vars,
            offset,
            ..Default::default()
        };
        let check = |i: usize| {
            if i >= num_vars {
                Err(QuboError::IndexOutOfRange { index: i, num_vars })
            } else {
                Ok(())
            }
        };
        let finite = |term: String, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(QuboError::NonFinite { term, value: v })
            }
        };
        finite("offset".into(), offset)?;
        for (i, v) in h {
            check(i)?;
            finite(format!("h {i}"), v)?;
            *out.h.entry(i).or_insert(0.0) += v;
        }
        for ((a, b), v) in j {
            check(a)?;
            check(b)?;
            finite(format!("J ({a}, {b})"), v)?;
            if a == b {
                out.offset += v;
            } else {
                let key = if a < b { (a, b) } else { (b, a) };
                *out.j.entry(key).or_insert(0.0) += v;
            }
        }
        out.h.retain(|_, v| *v != 0.0);
        out.j.retain(|_, v| *v != 0.0);
        Ok(out)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn h(&self) -> &BTreeMap<usize, f64> {
        &self.h
    }

    pub fn j(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.j
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn energy(&self, spins: &[i8]) -> Result<f64> {
        if spins.len() != self.num_vars {
            return Err(QuboError::LengthMismatch {
                expected: self.num_vars,
                got: spins.len(),
            });
        }
        if let Some(&s) = spins.iter().find(|&&s| s != 1 && s != -1) {
            return Err(QuboError::InvalidSpin(s));
        }
        let mut e = self.offset;
        for (&i, &h) in &self.h {
            e += h * spins[i] as f64;
        }
        for (&(a, b), &j) in &self.j {
            e += j * (spins[a] * spins[b]) as f64;
        }
        Ok(e)
    }
}

/// Substitutes `x = (1 - s) / 2`.
pub fn qubo_to_ising(model: &Qubo) -> IsingModel {
    let mut h: BTreeMap<usize, f64> = BTreeMap::new();
    let mut j = BTreeMap::new();
    let mut offset = model.offset();
    for (&i, &a) in model.linear() {
        offset += a / 2.0;
        *h.entry(i).or_insert(0.0) -= a / 2.0;
    }
    for (&(a, b), &w) in model.quadratic() {
        let q = w / 4.0;
        offset += q;
        *h.entry(a).or_insert(0.0) -= q;
        *h.entry(b).or_insert(0.0) -= q;
        j.insert((a, b), q);
    }
    h.retain(|_, v| *v != 0.0);
    IsingModel {
        num_vars: model.num_vars(),
        h,
        j,
        offset,
    }
}

/// Substitutes `s = 1 - 2x`.
pub fn ising_to_qubo(model: &IsingModel) -> Qubo {
    let mut builder = QuboBuilder::new(model.num_vars);
    let mut offset = model.offset;
    // indices and finiteness were validated when the Ising model was built
    for (&i, &h) in &model.h {
        offset += h;
        builder.add_linear(i, -2.0 * h).expect("valid index");
    }
    for (&(a, b), &w) in &model.j {
        offset += w;
        builder.add_linear(a, -2.0 * w).expect("valid index");
        builder.add_linear(b, -2.0 * w).expect("valid index");
        builder.add_quadratic(a, b, 4.0 * w).expect("valid index");
    }
    builder.add_offset(offset).expect("finite offset");
    builder.build().expect("finite coefficients")
}
