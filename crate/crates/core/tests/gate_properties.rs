use proptest::prelude::*;
use qubo_energy::gate::{
    ansatz_state, expectation, hamiltonian_from_ising, parameter_shift_gradient, AnsatzConfig,
};
use qubo_energy::qubo::{ising_to_qubo, IsingModel};
use qubo_energy::solvers::brute_force;

fn ising(max_vars: usize) -> impl Strategy<Value = IsingModel> {
    (1..=max_vars).prop_flat_map(|n| {
        let h = prop::collection::vec(-2.0..2.0f64, n);
        let j = prop::collection::vec(((0..n, 0..n), -2.0..2.0f64), 0..=2 * n);
        (Just(n), h, j, -1.0..1.0f64).prop_map(|(n, h, j, offset)| {
            let j: Vec<_> = j.into_iter().filter(|((a, b), _)| a != b).collect();
            IsingModel::new(n, h.into_iter().enumerate(), j, offset).unwrap()
        })
    })
}

fn spins_of(b: usize, n: usize) -> Vec<i8> {
    (0..n).map(|i| 1 - 2 * ((b >> i) & 1) as i8).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn diagonal_matches_ising_energy(model in ising(8)) {
        let ham = hamiltonian_from_ising(&model).unwrap();
        for (b, &e) in ham.energies().iter().enumerate() {
            let direct = model.energy(&spins_of(b, model.num_vars())).unwrap();
            prop_assert!((e - direct).abs() <= 1e-9 * direct.abs().max(1.0));
        }
    }

    #[test]
    fn exact_ground_agrees_with_brute_force(model in ising(12)) {
        let (bits, energy) = hamiltonian_from_ising(&model).unwrap().exact_ground();
        let brute = brute_force(&ising_to_qubo(&model)).unwrap();
        let best = brute.best().unwrap();
        prop_assert!((energy - best.energy).abs() <= 1e-9 * energy.abs().max(1.0));
        prop_assert_eq!(&bits, &best.assignment);
    }

    #[test]
    fn ansatz_states_stay_normalized(
        qubits in 1..=5usize,
        layers in 0..=3usize,
        seed in prop::collection::vec(-7.0..7.0f64, 24),
    ) {
        let config = AnsatzConfig::linear(qubits, layers);
        let params = &seed[..config.num_params()];
        let state = ansatz_state(&config, params).unwrap();
        prop_assert!((state.norm_sqr() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn expectation_is_probability_weighted_energy(
        model in ising(5),
        seed in prop::collection::vec(-3.0..3.0f64, 15),
    ) {
        let config = AnsatzConfig::linear(model.num_vars(), 2);
        let state = ansatz_state(&config, &seed[..config.num_params()]).unwrap();
        let ham = hamiltonian_from_ising(&model).unwrap();
        let direct: f64 = state.probabilities().iter().zip(ham.energies()).map(|(p, e)| p * e).sum();
        let e = expectation(&state, &ham).unwrap();
        prop_assert!((e - direct).abs() <= 1e-9 * direct.abs().max(1.0));
    }

    #[test]
    fn parameter_shift_matches_finite_differences(
        model in ising(4),
        seed in prop::collection::vec(-3.0..3.0f64, 12),
    ) {
        let config = AnsatzConfig::linear(model.num_vars(), 2);
        let ham = hamiltonian_from_ising(&model).unwrap();
        let params = seed[..config.num_params()].to_vec();
        let grad = parameter_shift_gradient(&config, &ham, &params).unwrap();
        let energy = |p: &[f64]| expectation(&ansatz_state(&config, p).unwrap(), &ham).unwrap();
        let h = 1e-4;
        let scale = grad.iter().fold(1.0f64, |m, g| m.max(g.abs()));
        for k in 0..params.len() {
            let (mut plus, mut minus) = (params.clone(), params.clone());
            plus[k] += h;
            minus[k] -= h;
            let fd = (energy(&plus) - energy(&minus)) / (2.0 * h);
            prop_assert!((grad[k] - fd).abs() <= 1e-5 * scale, "k={} shift={} fd={}", k, grad[k], fd);
        }
    }
}
