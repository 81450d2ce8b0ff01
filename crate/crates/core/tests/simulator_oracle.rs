//! Equivalence of the stride-based simulator with an independent
//! dense-matrix reference that multiplies out explicit `2^n x 2^n`
//! unitaries.

use proptest::prelude::*;
use pulsar_vqc::simulator::{Gate, Statevector};
use pulsar_vqc_testkit::{dense, random_circuit};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn amplitude_gap(state: &Statevector, reference: &[num_complex::Complex64]) -> f64 {
    state
        .amplitudes()
        .iter()
        .zip(reference)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
}

fn assorted_gates(n_qubits: usize) -> Vec<Gate> {
    let mut gates = Vec::new();
    for qubit in 0..n_qubits {
        for angle in [-1.9, -0.4, 0.0, 0.7, 2.6] {
            gates.push(Gate::Phase { qubit, angle });
            gates.push(Gate::Ry { qubit, angle });
            gates.push(Gate::Rz { qubit, angle });
        }
        gates.push(Gate::H { qubit });
        gates.push(Gate::X { qubit });
        for other in 0..n_qubits {
            if other != qubit {
                gates.push(Gate::Cnot {
                    control: qubit,
                    target: other,
                });
            }
        }
    }
    gates
}

#[test]
fn every_embedded_gate_matrix_is_unitary() {
    for n_qubits in 1..=3 {
        for gate in assorted_gates(n_qubits) {
            let matrix = dense::embedded_unitary(&gate, n_qubits);
            let defect = dense::unitarity_defect(&matrix);
            assert!(defect < 1e-12, "{gate:?} on {n_qubits} qubits: {defect}");
        }
    }
}

#[test]
fn seeded_random_circuits_match_the_dense_reference() {
    for seed in 0..60u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n_qubits = 1 + (seed as usize % 3);
        let gates = random_circuit(&mut rng, n_qubits, 30);
        let mut state = Statevector::zero(n_qubits).unwrap();
        state.apply_all(&gates).unwrap();
        let reference = dense::evolve(n_qubits, &gates);
        let gap = amplitude_gap(&state, &reference);
        assert!(gap < 1e-10, "seed {seed}: amplitude gap {gap}");
    }
}

#[test]
fn parity_readout_matches_the_dense_reference() {
    for seed in 100..130u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gates = random_circuit(&mut rng, 3, 25);
        let mut state = Statevector::zero(3).unwrap();
        state.apply_all(&gates).unwrap();
        let reference = dense::evolve(3, &gates);
        let reference_odd: f64 = reference
            .iter()
            .enumerate()
            .filter(|(index, _)| index.count_ones() % 2 == 1)
            .map(|(_, amp)| amp.norm_sqr())
            .sum();
        let (_, odd) = state.parity_probability();
        assert!((odd - reference_odd).abs() < 1e-12);
    }
}

proptest! {
    #[test]
    fn arbitrary_circuits_agree_with_the_dense_reference(
        seed in any::<u64>(),
        n_qubits in 1usize..=3,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gates = random_circuit(&mut rng, n_qubits, 25);
        let mut state = Statevector::zero(n_qubits).unwrap();
        state.apply_all(&gates).unwrap();
        let reference = dense::evolve(n_qubits, &gates);
        prop_assert!(amplitude_gap(&state, &reference) < 1e-10);
    }
}
