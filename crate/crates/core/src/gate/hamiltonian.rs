use crate::qubo::{Assignment, IsingModel};

use super::{basis_bits, check_qubits, lex_smallest, Result};

/// Ising Hamiltonian tabulated on the computational basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalHamiltonian {
    source: IsingModel,
    energies: Vec<f64>,
    min: f64,
    max: f64,
}

/// `E(b) = offset + Σ h_i s_i + Σ J_ij s_i s_j` with `s_i = 1 − 2 b_i`.
pub fn hamiltonian_from_ising(model: &IsingModel) -> Result<DiagonalHamiltonian> {
    let n = model.num_vars();
    check_qubits(n)?;
    let h: Vec<(usize, f64)> = model.h().iter().map(|(&i, &v)| (i, v)).collect();
    let j: Vec<(usize, usize, f64)> = model.j().iter().map(|(&(a, b), &v)| (a, b, v)).collect();
    let spin = |b: usize, i: usize| if (b >> i) & 1 == 1 { -1.0 } else { 1.0 };
    let energies: Vec<f64> = (0..1usize << n)
        .map(|b| {
            let mut e = model.offset();
            for &(i, v) in &h {
                e += v * spin(b, i);
            }
            for &(a, c, v) in &j {
                e += v * spin(b, a) * spin(b, c);
            }
            e
        })
        .collect();
    let min = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let max = energies.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(DiagonalHamiltonian {
        source: model.clone(),
        energies,
        min,
        max,
    })
}

impl DiagonalHamiltonian {
    pub fn num_qubits(&self) -> usize {
        self.source.num_vars()
    }

    pub fn source(&self) -> &IsingModel {
        &self.source
    }

    /// Energies indexed by basis state.
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn energy_of(&self, bits: &Assignment) -> Option<f64> {
        if bits.len() != self.num_qubits() {
            return None;
        }
        let b = bits
            .bits()
            .iter()
            .enumerate()
            .fold(0usize, |acc, (i, &v)| acc | (usize::from(v) << i));
        Some(self.energies[b])
    }

    pub fn min_energy(&self) -> f64 {
        self.min
    }

    pub fn max_energy(&self) -> f64 {
        self.max
    }

    /// Lowest-energy bitstring, lexicographically smallest among ties.
    pub fn exact_ground(&self) -> (Assignment, f64) {
        let n = self.num_qubits();
        let b = lex_smallest(
            (0..self.energies.len()).filter(|&b| self.energies[b] == self.min),
            n,
        )
        .expect("at least one basis state");
        (
            Assignment::new(basis_bits(b, n)).expect("bits are binary"),
            self.min,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gate::GateError;

    fn at(h: &DiagonalHamiltonian, s: &str) -> f64 {
        h.energy_of(&s.parse().unwrap()).unwrap()
    }

    #[test]
    fn single_field() {
        let m = IsingModel::new(1, [(0, -1.0)], [], 0.0).unwrap();
        let h = hamiltonian_from_ising(&m).unwrap();
        assert_eq!((at(&h, "0"), at(&h, "1")), (-1.0, 1.0));
        let (g, e) = h.exact_ground();
        assert_eq!((g.to_string(), e), ("0".to_string(), -1.0));
    }

    #[test]
    fn coupling_pair() {
        let m = IsingModel::new(2, [], [((0, 1), 1.0)], 0.0).unwrap();
        let h = hamiltonian_from_ising(&m).unwrap();
        assert_eq!(
            [at(&h, "00"), at(&h, "11"), at(&h, "01"), at(&h, "10")],
            [1.0, 1.0, -1.0, -1.0]
        );
        let (g, e) = h.exact_ground();
        assert_eq!((g.to_string(), e), ("01".to_string(), -1.0));
    }

    #[test]
    fn too_many_qubits() {
        let m = IsingModel::new(21, [], [], 0.0).unwrap();
        assert_eq!(
            hamiltonian_from_ising(&m).unwrap_err(),
            GateError::TooManyQubits { qubits: 21 }
        );
    }
}
