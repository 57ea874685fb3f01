use std::fmt;
use std::str::FromStr;

use super::{QuboError, Result};

/// A binary vector `x ∈ {0,1}^n`, ordered lexicographically with index 0 most
/// significant.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Assignment(Vec<u8>);

impl Assignment {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(&b) = bits.iter().find(|&&b| b > 1) {
            return Err(QuboError::InvalidBit(b));
        }
        Ok(Self(bits))
    }

    pub(crate) fn from_bits_unchecked(bits: Vec<u8>) -> Self {
        debug_assert!(bits.iter().all(|&b| b <= 1));
        Self(bits)
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![0; len])
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        Self(bits.iter().map(|&b| b as u8).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn into_bits(self) -> Vec<u8> {
        self.0
    }

    pub fn get(&self, i: usize) -> Option<u8> {
        self.0.get(i).copied()
    }

    pub fn is_set(&self, i: usize) -> bool {
        self.0[i] == 1
    }

    /// Spin view `s_i = 1 - 2 x_i`.
    pub fn spins(&self) -> Vec<i8> {
        self.0.iter().map(|&b| 1 - 2 * b as i8).collect()
    }

    pub fn from_spins(spins: &[i8]) -> Result<Self> {
        spins
            .iter()
            .map(|&s| match s {
                1 => Ok(0),
                -1 => Ok(1),
                other => Err(QuboError::InvalidSpin(other)),
            })
            .collect::<Result<Vec<u8>>>()
            .map(Self)
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Assignment {
    type Err = QuboError;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(QuboError::Parse(format!("unexpected character {other:?}"))),
            })
            .collect::<Result<Vec<u8>>>()
            .map(Self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn string_roundtrip_and_spins() {
        let a: Assignment = "0110".parse().unwrap();
        assert_eq!(a.to_string(), "0110");
        assert_eq!(a.spins(), vec![1, -1, -1, 1]);
        assert_eq!(Assignment::from_spins(&a.spins()).unwrap(), a);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(Assignment::new(vec![0, 2]).is_err());
        assert!("01x".parse::<Assignment>().is_err());
        assert!(Assignment::from_spins(&[0]).is_err());
    }

    #[test]
    fn lexicographic_order() {
        let a: Assignment = "01".parse().unwrap();
        let b: Assignment = "10".parse().unwrap();
        assert!(a < b);
    }
}
