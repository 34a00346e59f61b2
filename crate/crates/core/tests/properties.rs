//! Randomized invariants over the simulator, Fisher matrices, and
//! optimizers. Case counts are trimmed on the heavier numerical checks.

use ndarray::Array2;
use proptest::prelude::*;

use natgrad::circuit::{build_ansatz, sample_random_measurement, AnsatzFamily, AnsatzSpec};
use natgrad::fisher::{
    cfim, gradient_parameter_shift, qfim_exact, ResourceCounter, DEFAULT_PROB_FLOOR,
};
use natgrad::hamiltonian::PauliHamiltonian;
use natgrad::linalg;
use natgrad::optimize::{
    run, sample_subset, subset_coverage_probability, MeasurementStrategy, Method, OptimizerConfig,
};
use natgrad::problems::{
    cut_weight, maxcut_hamiltonian, number_partitioning_hamiltonian, partition_residue_squared,
};
use natgrad::statevector::{Axis, Statevector};

fn apply_indexed_gate(state: &mut Statevector, kind: u8, qubit: usize, theta: f64) {
    let n = state.n_qubits();
    let q = qubit % n;
    match kind % 5 {
        0 => state.apply_rotation(Axis::X, q, theta),
        1 => state.apply_rotation(Axis::Y, q, theta),
        2 => state.apply_rotation(Axis::Z, q, theta),
        3 => state.apply_cnot(q, (q + 1) % n),
        _ => state.apply_cz(q, (q + 1) % n),
    }
}

fn random_symmetric(entries: &[f64], dim: usize) -> Array2<f64> {
    let a = Array2::from_shape_vec((dim, dim), entries.to_vec()).unwrap();
    (&a + &a.t()) * 0.5
}

fn small_circuit(n_qubits: usize, layers: usize, family_flag: bool) -> AnsatzSpec {
    let family = if family_flag {
        AnsatzFamily::RyRzCnot
    } else {
        AnsatzFamily::RyCz
    };
    AnsatzSpec::new(family, n_qubits, layers)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gates_preserve_norm(
        n in 2usize..=4,
        ops in prop::collection::vec((0u8..5, 0usize..4, -10.0f64..10.0), 0..24),
    ) {
        let mut state = Statevector::new(n).unwrap();
        for (kind, q, theta) in ops {
            apply_indexed_gate(&mut state, kind, q, theta);
        }
        prop_assert!((state.norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rotations_are_2pi_periodic_up_to_phase(
        n in 2usize..=3,
        axis_id in 0u8..3,
        q in 0usize..3,
        theta in -7.0f64..7.0,
    ) {
        let axis = [Axis::X, Axis::Y, Axis::Z][axis_id as usize];
        let mut a = Statevector::new(n).unwrap();
        let mut b = Statevector::new(n).unwrap();
        for k in 0..n {
            a.apply_hadamard(k);
            b.apply_hadamard(k);
        }
        a.apply_rotation(axis, q % n, theta);
        b.apply_rotation(axis, q % n, theta + std::f64::consts::TAU);
        prop_assert!((a.fidelity(&b).unwrap() - 1.0).abs() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cfim_is_symmetric_psd_and_below_qfim(
        family_flag in any::<bool>(),
        layers in 1usize..=2,
        theta_seed in any::<u64>(),
        basis_seed in any::<u64>(),
    ) {
        let spec = small_circuit(3, layers, family_flag);
        let circuit = build_ansatz(&spec).unwrap();
        let theta = natgrad::experiment::draw_initial_parameters(circuit.n_params(), theta_seed);
        let basis = sample_random_measurement(
            spec.family,
            spec.connectivity,
            3,
            1,
            basis_seed,
        ).unwrap();
        let mut counter = ResourceCounter::new();
        let fc = cfim(&circuit, &basis, &theta, DEFAULT_PROB_FLOOR, &mut counter).unwrap();
        let fq = qfim_exact(&circuit, &theta).unwrap();
        for i in 0..circuit.n_params() {
            for j in 0..i {
                prop_assert_eq!(fc.entries[(i, j)].to_bits(), fc.entries[(j, i)].to_bits());
            }
        }
        prop_assert!(linalg::min_eigenvalue(&fc.entries).unwrap() > -1e-8);
        let gap = &fq.entries - &fc.entries;
        prop_assert!(linalg::min_eigenvalue(&gap).unwrap() > -1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eigh_reconstructs_and_pinv_is_moore_penrose(
        entries in prop::collection::vec(-2.0f64..2.0, 16),
    ) {
        let s = random_symmetric(&entries, 4);
        let decomp = linalg::eigh(&s).unwrap();
        let lambda = Array2::from_diag(&decomp.eigenvalues);
        let rebuilt = decomp.eigenvectors.dot(&lambda).dot(&decomp.eigenvectors.t());
        prop_assert!(linalg::frobenius_norm(&(&rebuilt - &s)) < 1e-8);
        let gram = decomp.eigenvectors.t().dot(&decomp.eigenvectors);
        prop_assert!(linalg::frobenius_norm(&(&gram - &Array2::<f64>::eye(4))) < 1e-8);

        let pinv = linalg::pinv_cutoff(&s, 1e-4).unwrap();
        for i in 0..4 {
            for j in 0..i {
                prop_assert_eq!(pinv[(i, j)].to_bits(), pinv[(j, i)].to_bits());
            }
        }
        let back = s.dot(&pinv).dot(&s);
        // cutoff discards eigenvalues up to 1e-4, so reconstruction can be
        // off by that much in norm
        prop_assert!(linalg::frobenius_norm(&(&back - &s)) < 1e-3);
    }

    #[test]
    fn subsets_are_sorted_unique_and_in_range(
        m in 1usize..=12,
        seed in any::<u64>(),
        l_frac in 0.0f64..1.0,
    ) {
        let l = 1 + ((m - 1) as f64 * l_frac) as usize;
        let subset = sample_subset(m, l, seed).unwrap();
        prop_assert_eq!(subset.len(), l);
        prop_assert!(subset.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(subset.iter().all(|&i| i < m));
    }

    #[test]
    fn coverage_probability_is_monotone_in_draw_size(
        m in 2usize..=10,
        l_frac in 0.0f64..1.0,
    ) {
        let l = 1 + ((m - 2) as f64 * l_frac) as usize;
        let mut previous = 0.0;
        for k in 0..=(m - l) {
            let p = subset_coverage_probability(m, l, k).unwrap();
            prop_assert!((0.0..=1.0 + 1e-12).contains(&p));
            prop_assert!(p >= previous - 1e-12);
            previous = p;
        }
        prop_assert!((previous - 1.0).abs() < 1e-9);
    }

    #[test]
    fn maxcut_diagonal_is_negated_cut_weight(
        n in 3usize..=6,
        edge_mask in any::<u32>(),
        weights in prop::collection::vec(0.1f64..4.0, 15),
    ) {
        let mut edges = Vec::new();
        let mut bit = 0;
        for u in 0..n {
            for v in (u + 1)..n {
                if edge_mask & (1 << bit) != 0 {
                    edges.push((u, v, weights[bit % weights.len()]));
                }
                bit += 1;
            }
        }
        prop_assume!(!edges.is_empty());
        let h = maxcut_hamiltonian(n, &edges).unwrap();
        let energies = h.diagonal_energies().unwrap();
        for b in 0..(1usize << n) {
            let expected = -cut_weight(&edges, b);
            prop_assert!((energies[b] - expected).abs() < 1e-9 * (1.0 + expected.abs()));
        }
    }

    #[test]
    fn number_partitioning_diagonal_is_squared_residue(
        numbers in prop::collection::vec(1u64..=30, 2..=6),
    ) {
        let h = number_partitioning_hamiltonian(&numbers).unwrap();
        let energies = h.diagonal_energies().unwrap();
        for b in 0..(1usize << numbers.len()) {
            prop_assert_eq!(energies[b], partition_residue_squared(&numbers, b) as f64);
        }
    }

    #[test]
    fn derive_seed_is_injective_per_stream(
        base in any::<u64>(),
        s1 in any::<u64>(),
        s2 in any::<u64>(),
    ) {
        prop_assume!(s1 != s2);
        prop_assert_ne!(natgrad::derive_seed(base, s1), natgrad::derive_seed(base, s2));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn parameter_shift_gradient_matches_finite_differences(
        theta_seed in any::<u64>(),
    ) {
        let spec = AnsatzSpec::new(AnsatzFamily::RyCz, 2, 1);
        let circuit = build_ansatz(&spec).unwrap();
        let theta = natgrad::experiment::draw_initial_parameters(circuit.n_params(), theta_seed);
        let h = natgrad::problems::heisenberg_hamiltonian(2, 1.0, 1.0).unwrap();
        let mut counter = ResourceCounter::new();
        let grad = gradient_parameter_shift(&circuit, &h, &theta, &mut counter).unwrap();
        let step = 1e-5;
        for j in 0..circuit.n_params() {
            let mut plus = theta.clone();
            plus[j] += step;
            let mut minus = theta.clone();
            minus[j] -= step;
            let fd = (h.loss(&circuit.evaluate(&plus).unwrap()).unwrap()
                - h.loss(&circuit.evaluate(&minus).unwrap()).unwrap())
                / (2.0 * step);
            prop_assert!((grad[j] - fd).abs() < 1e-6);
        }
    }

    #[test]
    fn single_qubit_steps_strictly_decrease_loss(
        theta0 in -3.0f64..3.0,
        eta in 0.001f64..=0.1,
        method_id in 0u8..3,
    ) {
        prop_assume!(theta0.sin().abs() > 1e-3);
        let circuit = natgrad::circuit::ParameterizedCircuit::new(
            1,
            vec![natgrad::circuit::Gate::Rotation { axis: Axis::Y, qubit: 0, param: 0 }],
        ).unwrap();
        let z = natgrad::hamiltonian::PauliString::from_sites(
            1, 1.0, &[(0, natgrad::hamiltonian::Pauli::Z)],
        ).unwrap();
        let h = PauliHamiltonian::new(1, vec![z], 0.0).unwrap();
        let method = [
            Method::GradientDescent,
            Method::QuantumNaturalGradient,
            Method::RandomNaturalGradient,
        ][method_id as usize];
        let mut config = OptimizerConfig::new(method, eta, 1, 5);
        if method == Method::RandomNaturalGradient {
            config.measurement = Some(MeasurementStrategy::Computational);
        }
        let result = run(&circuit, &h, &[theta0], &config).unwrap();
        prop_assert!(result.final_loss() < result.initial_loss());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn optimizer_runs_are_seed_deterministic(seed in any::<u64>()) {
        let spec = AnsatzSpec::new(AnsatzFamily::RyCz, 2, 1);
        let circuit = build_ansatz(&spec).unwrap();
        let theta0 = natgrad::experiment::draw_initial_parameters(circuit.n_params(), 3);
        let h = natgrad::problems::heisenberg_hamiltonian(2, 1.0, 1.0).unwrap();
        let mut config = OptimizerConfig::new(Method::RandomNaturalGradient, 0.05, 2, seed);
        config.measurement = Some(MeasurementStrategy::default_for(&spec));
        let a = run(&circuit, &h, &theta0, &config).unwrap();
        let b = run(&circuit, &h, &theta0, &config).unwrap();
        for (ra, rb) in a.records.iter().zip(&b.records) {
            prop_assert_eq!(ra.loss.to_bits(), rb.loss.to_bits());
            prop_assert_eq!(ra.preparations, rb.preparations);
        }
    }
}
