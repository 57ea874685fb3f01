use std::f64::consts::{FRAC_PI_2, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::qubo::Assignment;

use super::{
    ansatz_state, basis_bits, lex_smallest, AnsatzConfig, DiagonalHamiltonian, GateError, Result,
    Statevector,
};

/// `Σ_b |amp_b|² E(b)`, renormalized and accumulated relative to the lowest
/// energy so the value cannot leave `[min E, max E]`.
pub fn expectation(state: &Statevector, ham: &DiagonalHamiltonian) -> Result<f64> {
    if state.num_qubits() != ham.num_qubits() {
        return Err(GateError::DimensionMismatch {
            expected: ham.num_qubits(),
            got: state.num_qubits(),
        });
    }
    let base = ham.min_energy();
    let span = ham.max_energy() - base;
    let (mut weighted, mut total) = (0.0, 0.0);
    for (a, &e) in state.amplitudes().iter().zip(ham.energies()) {
        let p = a.norm_sqr();
        weighted += p * (e - base);
        total += p;
    }
    Ok(base + (weighted / total).clamp(0.0, span))
}

/// Exact gradient of the energy by the two-term shift rule
/// `(E(θ + π/2) − E(θ − π/2)) / 2`.
pub fn parameter_shift_gradient(
    config: &AnsatzConfig,
    ham: &DiagonalHamiltonian,
    params: &[f64],
) -> Result<Vec<f64>> {
    let mut shifted = params.to_vec();
    let mut grad = Vec::with_capacity(params.len());
    for k in 0..params.len() {
        shifted[k] = params[k] + FRAC_PI_2;
        let plus = expectation(&ansatz_state(config, &shifted)?, ham)?;
        shifted[k] = params[k] - FRAC_PI_2;
        let minus = expectation(&ansatz_state(config, &shifted)?, ham)?;
        shifted[k] = params[k];
        grad.push((plus - minus) / 2.0);
    }
    Ok(grad)
}

#[derive(Debug, Clone, PartialEq)]
pub struct VqeConfig {
    pub ansatz: AnsatzConfig,
    pub max_iters: usize,
    pub restarts: usize,
    /// Initial gradient step; halved whenever a step fails to lower the energy.
    pub step: f64,
    pub seed: u64,
}

impl VqeConfig {
    /// Linear-chain ansatz with two layers, 200 iterations, 8 restarts, step 0.1.
    pub fn new(qubits: usize, seed: u64) -> Self {
        Self {
            ansatz: AnsatzConfig::linear(qubits, 2),
            max_iters: 200,
            restarts: 8,
            step: 0.1,
            seed,
        }
    }

    fn validate(&self, ham: &DiagonalHamiltonian) -> Result<()> {
        self.ansatz.validate()?;
        if self.ansatz.qubits != ham.num_qubits() {
            return Err(GateError::DimensionMismatch {
                expected: ham.num_qubits(),
                got: self.ansatz.qubits,
            });
        }
        if self.max_iters == 0 || self.restarts == 0 || !(self.step.is_finite() && self.step > 0.0)
        {
            return Err(GateError::InvalidConfig(
                "iterations, restarts and step must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VqeResult {
    pub params: Vec<f64>,
    /// Most probable outcome of the best run (lexicographically smallest on ties).
    pub best_bits: Assignment,
    /// Expectation value of the best run.
    pub energy: f64,
    /// Outcome probabilities of the best run, by basis index.
    pub probabilities: Vec<f64>,
    /// Final expectation of every restart, in restart order.
    pub run_energies: Vec<f64>,
}

struct Run {
    params: Vec<f64>,
    energy: f64,
}

fn descend(config: &VqeConfig, ham: &DiagonalHamiltonian, restart: usize) -> Result<Run> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ restart as u64);
    let mut params: Vec<f64> = (0..config.ansatz.num_params())
        .map(|_| rng.random_range(0.0..TAU))
        .collect();
    let mut energy = expectation(&ansatz_state(&config.ansatz, &params)?, ham)?;
    let mut step = config.step;
    for _ in 0..config.max_iters {
        let grad = parameter_shift_gradient(&config.ansatz, ham, &params)?;
        if grad.iter().all(|g| g.abs() < 1e-12) {
            break;
        }
        loop {
            let trial: Vec<f64> = params
                .iter()
                .zip(&grad)
                .map(|(p, g)| p - step * g)
                .collect();
            let e = expectation(&ansatz_state(&config.ansatz, &trial)?, ham)?;
            if e < energy {
                params = trial;
                energy = e;
                break;
            }
            step /= 2.0;
            if step < 1e-10 {
                return Ok(Run { params, energy });
            }
        }
    }
    Ok(Run { params, energy })
}

/// Gradient descent on the ansatz energy from `restarts` seeded random
/// starts (restart `r` uses seed `seed ^ r`). The run with the lowest final
/// energy is reported.
pub fn vqe_minimize(ham: &DiagonalHamiltonian, config: &VqeConfig) -> Result<VqeResult> {
    config.validate(ham)?;
    let runs: Vec<Run> = (0..config.restarts)
        .into_par_iter()
        .map(|r| descend(config, ham, r))
        .collect::<Result<_>>()?;
    let run_energies: Vec<f64> = runs.iter().map(|r| r.energy).collect();
    let best = runs
        .into_iter()
        .reduce(|a, b| if b.energy < a.energy { b } else { a })
        .expect("restarts >= 1");
    let state = ansatz_state(&config.ansatz, &best.params)?;
    let probabilities = state.probabilities();
    let top = probabilities.iter().copied().fold(0.0, f64::max);
    let n = ham.num_qubits();
    let b = lex_smallest(
        (0..probabilities.len()).filter(|&b| probabilities[b] == top),
        n,
    )
    .expect("nonempty state");
    Ok(VqeResult {
        params: best.params,
        best_bits: Assignment::new(basis_bits(b, n))?,
        energy: best.energy,
        probabilities,
        run_energies,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gate::hamiltonian_from_ising;
    use crate::qubo::IsingModel;

    fn coupled() -> DiagonalHamiltonian {
        hamiltonian_from_ising(&IsingModel::new(2, [], [((0, 1), 1.0)], 0.0).unwrap()).unwrap()
    }

    #[test]
    fn expectation_examples() {
        let h = coupled();
        let e = expectation(&Statevector::basis(2, 0b10).unwrap(), &h).unwrap();
        assert_eq!(e, -1.0);
        assert_eq!(
            expectation(&Statevector::uniform(2).unwrap(), &h).unwrap(),
            0.0
        );
        let fields =
            hamiltonian_from_ising(&IsingModel::new(2, [(0, 3.0), (1, -1.5)], [], 0.5).unwrap())
                .unwrap();
        let e = expectation(&Statevector::uniform(2).unwrap(), &fields).unwrap();
        assert!((e - 0.5).abs() < 1e-15);
        assert!(expectation(&Statevector::uniform(3).unwrap(), &h).is_err());
    }

    #[test]
    fn single_qubit_converges() {
        let h = hamiltonian_from_ising(&IsingModel::new(1, [(0, -1.0)], [], 0.0).unwrap()).unwrap();
        let r = vqe_minimize(&h, &VqeConfig::new(1, 3)).unwrap();
        assert!(r.probabilities[0] >= 0.99);
        assert_eq!(r.best_bits.to_string(), "0");
        assert!(r.energy < -0.99);
    }

    #[test]
    fn coupled_pair_reaches_ground() {
        let r = vqe_minimize(&coupled(), &VqeConfig::new(2, 11)).unwrap();
        assert!(r.energy <= -0.9 && r.energy >= -1.0);
        assert_eq!(r.run_energies.len(), 8);
    }

    #[test]
    fn config_must_match() {
        assert!(vqe_minimize(&coupled(), &VqeConfig::new(3, 0)).is_err());
        let mut c = VqeConfig::new(2, 0);
        c.restarts = 0;
        assert!(vqe_minimize(&coupled(), &c).is_err());
    }
}
