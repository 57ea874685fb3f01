//! QUBO and Ising reformulations of three energy-systems problems
//! (quadratic assignment, single-period unit commitment and the heat-exchanger
//! minimum-matches problem), classical samplers standing in for an annealer,
//! a statevector variational solver, and exact oracles for validation.

pub mod formulations;
pub mod gate;
pub mod qubo;
pub mod solvers;
