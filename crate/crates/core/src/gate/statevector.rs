use std::collections::BTreeSet;

use num_complex::Complex64;

use super::{check_qubits, GateError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    qubits: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    /// `|0…0⟩`
    pub fn zero(qubits: usize) -> Result<Self> {
        check_qubits(qubits)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Self { qubits, amps })
    }

    /// Equal superposition over all basis states.
    pub fn uniform(qubits: usize) -> Result<Self> {
        check_qubits(qubits)?;
        let a = (1.0 / (1usize << qubits) as f64).sqrt();
        Ok(Self {
            qubits,
            amps: vec![Complex64::new(a, 0.0); 1 << qubits],
        })
    }

    /// The basis state with basis index `b`.
    pub fn basis(qubits: usize, b: usize) -> Result<Self> {
        let mut s = Self::zero(qubits)?;
        if b >= s.amps.len() {
            return Err(GateError::DimensionMismatch {
                expected: s.amps.len(),
                got: b,
            });
        }
        s.amps[0] = Complex64::new(0.0, 0.0);
        s.amps[b] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    pub fn num_qubits(&self) -> usize {
        self.qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `exp(−iθY/2)` on qubit `q`.
    pub fn apply_ry(&mut self, q: usize, theta: f64) {
        let (s, c) = (theta / 2.0).sin_cos();
        let mask = 1usize << q;
        for i0 in (0..self.amps.len()).filter(|i| i & mask == 0) {
            let i1 = i0 | mask;
            let (a0, a1) = (self.amps[i0], self.amps[i1]);
            self.amps[i0] = a0 * c - a1 * s;
            self.amps[i1] = a0 * s + a1 * c;
        }
    }

    /// Controlled-Z: phase −1 where both qubits are 1.
    pub fn apply_cz(&mut self, a: usize, b: usize) {
        let mask = (1usize << a) | (1usize << b);
        for (i, amp) in self.amps.iter_mut().enumerate() {
            if i & mask == mask {
                *amp = -*amp;
            }
        }
    }
}

/// Ry layer, then `layers` repetitions of {CZ on every mapped pair, Ry layer}.
#[derive(Debug, Clone, PartialEq)]
pub struct AnsatzConfig {
    pub qubits: usize,
    pub layers: usize,
    pub entanglers: Vec<(usize, usize)>,
}

impl AnsatzConfig {
    /// Linear chain `(0,1), (1,2), …` with the given depth.
    pub fn linear(qubits: usize, layers: usize) -> Self {
        Self {
            qubits,
            layers,
            entanglers: (1..qubits).map(|q| (q - 1, q)).collect(),
        }
    }

    pub fn num_params(&self) -> usize {
        self.qubits * (self.layers + 1)
    }

    pub fn validate(&self) -> Result<()> {
        check_qubits(self.qubits)?;
        let mut seen = BTreeSet::new();
        for &(a, b) in &self.entanglers {
            if a == b || a >= self.qubits || b >= self.qubits || !seen.insert((a.min(b), a.max(b)))
            {
                return Err(GateError::InvalidConfig(format!(
                    "entangler pair ({a}, {b}) is invalid or repeated"
                )));
            }
        }
        Ok(())
    }
}

pub fn ansatz_state(config: &AnsatzConfig, params: &[f64]) -> Result<Statevector> {
    config.validate()?;
    if params.len() != config.num_params() {
        return Err(GateError::DimensionMismatch {
            expected: config.num_params(),
            got: params.len(),
        });
    }
    let n = config.qubits;
    let mut state = Statevector::zero(n)?;
    for (layer, thetas) in params.chunks(n.max(1)).enumerate().take(config.layers + 1) {
        if layer > 0 {
            for &(a, b) in &config.entanglers {
                state.apply_cz(a, b);
            }
        }
        for (q, &t) in thetas.iter().enumerate() {
            state.apply_ry(q, t);
        }
    }
    Ok(state)
}
