//! Test-only support for `pulsar-vqc`.
//!
//! Everything here exists to check the production code by an independent
//! route and must stay that way:
//!
//! * [`dense`] — a reference simulator that builds each gate as an explicit
//!   `2^n x 2^n` unitary matrix and evolves the state by dense matrix-vector
//!   products. The production simulator never materializes a matrix, so
//!   agreement between the two is a meaningful check.
//! * [`random_circuit`] — seeded random gate sequences for equivalence and
//!   norm-preservation sweeps.
//! * [`fd_gradient`] — central finite differences through the model loss,
//!   the reference for the parameter-shift gradient.
//! * [`fixture_csv`] / [`htru_csv`] — locations of the bundled synthetic
//!   data file and the (optional, user-supplied) canonical HTRU-2 file.

use ndarray::ArrayView2;
use pulsar_vqc::simulator::Gate;
use pulsar_vqc::vqc::VqcModel;
use rand::Rng;
use std::path::PathBuf;

pub mod dense {
    //! Dense-matrix reference simulation.

    use num_complex::Complex64;
    use pulsar_vqc::simulator::Gate;
    use std::f64::consts::FRAC_1_SQRT_2;

    /// Row-major square complex matrix.
    pub type Matrix = Vec<Vec<Complex64>>;

    fn zeros(dim: usize) -> Matrix {
        vec![vec![Complex64::ZERO; dim]; dim]
    }

    /// The defining 2x2 matrix and target qubit of a single-qubit gate.
    fn single_qubit_parts(gate: &Gate) -> Option<(usize, [[Complex64; 2]; 2])> {
        let r = |x: f64| Complex64::new(x, 0.0);
        match *gate {
            Gate::H { qubit } => Some((
                qubit,
                [
                    [r(FRAC_1_SQRT_2), r(FRAC_1_SQRT_2)],
                    [r(FRAC_1_SQRT_2), -r(FRAC_1_SQRT_2)],
                ],
            )),
            Gate::X { qubit } => Some((qubit, [[r(0.0), r(1.0)], [r(1.0), r(0.0)]])),
            Gate::Phase { qubit, angle } => Some((
                qubit,
                [[r(1.0), r(0.0)], [r(0.0), Complex64::cis(angle)]],
            )),
            Gate::Ry { qubit, angle } => {
                let c = r((angle / 2.0).cos());
                let s = r((angle / 2.0).sin());
                Some((qubit, [[c, -s], [s, c]]))
            }
            Gate::Rz { qubit, angle } => Some((
                qubit,
                [
                    [Complex64::cis(-angle / 2.0), r(0.0)],
                    [r(0.0), Complex64::cis(angle / 2.0)],
                ],
            )),
            Gate::Cnot { .. } => None,
        }
    }

    /// Embeds `gate` into the full `2^n x 2^n` unitary, entry by entry.
    ///
    /// For a single-qubit gate `m` on qubit `q`, entry `(row, col)` is
    /// `m[row_q][col_q]` when the remaining bits of `row` and `col` agree and
    /// zero otherwise. A CNOT is a permutation matrix mapping each column
    /// index to its image under the controlled bit flip.
    pub fn embedded_unitary(gate: &Gate, n_qubits: usize) -> Matrix {
        let dim = 1usize << n_qubits;
        let mut matrix = zeros(dim);
        if let Gate::Cnot { control, target } = *gate {
            for col in 0..dim {
                let row = if col & (1 << control) != 0 {
                    col ^ (1 << target)
                } else {
                    col
                };
                matrix[row][col] = Complex64::ONE;
            }
        } else {
            let (q, m) = single_qubit_parts(gate).expect("single-qubit gate");
            let mask = 1usize << q;
            for row in 0..dim {
                for col in 0..dim {
                    if row & !mask == col & !mask {
                        matrix[row][col] =
                            m[(row & mask != 0) as usize][(col & mask != 0) as usize];
                    }
                }
            }
        }
        matrix
    }

    /// Dense matrix-vector product.
    pub fn matvec(matrix: &Matrix, vector: &[Complex64]) -> Vec<Complex64> {
        matrix
            .iter()
            .map(|row| {
                row.iter()
                    .zip(vector)
                    .map(|(m, v)| m * v)
                    .sum::<Complex64>()
            })
            .collect()
    }

    /// Evolves `|0...0⟩` through the circuit using only dense unitaries.
    pub fn evolve(n_qubits: usize, gates: &[Gate]) -> Vec<Complex64> {
        let dim = 1usize << n_qubits;
        let mut state = vec![Complex64::ZERO; dim];
        state[0] = Complex64::ONE;
        for gate in gates {
            let unitary = embedded_unitary(gate, n_qubits);
            state = matvec(&unitary, &state);
        }
        state
    }

    /// Largest absolute deviation of `U† U` from the identity.
    pub fn unitarity_defect(matrix: &Matrix) -> f64 {
        let dim = matrix.len();
        let mut worst = 0.0f64;
        for i in 0..dim {
            for j in 0..dim {
                let mut entry = Complex64::ZERO;
                for k in 0..dim {
                    entry += matrix[k][i].conj() * matrix[k][j];
                }
                let expected = if i == j { Complex64::ONE } else { Complex64::ZERO };
                worst = worst.max((entry - expected).norm());
            }
        }
        worst
    }
}

/// Draws a random circuit of up to `max_gates` gates on `n_qubits` qubits.
///
/// Gate kinds are sampled uniformly; CNOTs are only drawn on registers with
/// at least two qubits. Angles are uniform over `[-2π, 2π)`.
pub fn random_circuit<R: Rng>(rng: &mut R, n_qubits: usize, max_gates: usize) -> Vec<Gate> {
    use std::f64::consts::PI;
    let count = rng.random_range(0..=max_gates);
    let kinds = if n_qubits >= 2 { 6 } else { 5 };
    (0..count)
        .map(|_| {
            let qubit = rng.random_range(0..n_qubits);
            let angle = rng.random_range(-2.0 * PI..2.0 * PI);
            match rng.random_range(0..kinds) {
                0 => Gate::H { qubit },
                1 => Gate::X { qubit },
                2 => Gate::Phase { qubit, angle },
                3 => Gate::Ry { qubit, angle },
                4 => Gate::Rz { qubit, angle },
                _ => {
                    let offset = rng.random_range(1..n_qubits);
                    Gate::Cnot {
                        control: qubit,
                        target: (qubit + offset) % n_qubits,
                    }
                }
            }
        })
        .collect()
}

/// Central finite differences of the model's loss with respect to each
/// trainable weight: `(L(w + h e_k) - L(w - h e_k)) / 2h`.
pub fn fd_gradient(
    model: &VqcModel,
    features: ArrayView2<'_, f64>,
    labels: &[u8],
    step: f64,
) -> Vec<f64> {
    let base = model.weights().to_vec();
    let mut probe = model.clone();
    (0..base.len())
        .map(|k| {
            let mut up = base.clone();
            up[k] += step;
            probe.set_weights(up).expect("weight length preserved");
            let plus = probe
                .cross_entropy_loss(features, labels)
                .expect("loss at shifted weights");
            let mut down = base.clone();
            down[k] -= step;
            probe.set_weights(down).expect("weight length preserved");
            let minus = probe
                .cross_entropy_loss(features, labels)
                .expect("loss at shifted weights");
            (plus - minus) / (2.0 * step)
        })
        .collect()
}

/// Path of the bundled 60-row synthetic data file (always present).
pub fn fixture_csv() -> PathBuf {
    workspace_root().join("data/htru_synthetic_60.csv")
}

/// Path of the canonical HTRU-2 CSV if the user has placed it in `data/`,
/// or set `PULSAR_VQC_DATA` to point at it. `None` means tests that need
/// the real survey data should skip.
pub fn htru_csv() -> Option<PathBuf> {
    if let Ok(path) = std::env::var("PULSAR_VQC_DATA") {
        let path = PathBuf::from(path);
        if path.is_file() {
            return Some(path);
        }
    }
    let default = workspace_root().join("data/HTRU_2.csv");
    default.is_file().then_some(default)
}

fn workspace_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .parent()
        .and_then(|p| p.parent())
        .expect("testkit lives two levels below the workspace root")
        .to_path_buf()
}

/// Builds an `Array2` from row slices, for tests that hand-write sample sets.
pub fn rows(data: &[&[f64]]) -> ndarray::Array2<f64> {
    let n_rows = data.len();
    let n_cols = data.first().map_or(0, |r| r.len());
    let flat: Vec<f64> = data.iter().flat_map(|r| r.iter().copied()).collect();
    ndarray::Array2::from_shape_vec((n_rows, n_cols), flat).expect("consistent row lengths")
}
