//! Dense statevector simulation of a small qubit register.
//!
//! The simulator keeps the full complex amplitude vector of an `n`-qubit
//! register (length `2^n`) and updates it in place, one gate at a time. Each
//! gate kind has its own specialized update loop over strided amplitude
//! pairs; no gate is ever expanded into a `2^n x 2^n` matrix. Readout is
//! exact: probabilities come straight from the Born rule, with no shot
//! sampling anywhere.
//!
//! # Indexing convention
//!
//! Qubit 0 is the least-significant bit of the basis-state index. For a
//! 3-qubit register, index `0b101 = 5` is the state where qubits 0 and 2 are
//! `|1⟩` and qubit 1 is `|0⟩`. Gate targets are validated against the
//! register size at application time.
//!
//! # Gate set
//!
//! * `H` — Hadamard.
//! * `X` — Pauli X.
//! * `P(λ)` — phase gate `diag(1, e^{iλ})`.
//! * `RY(θ)` — rotation `[[cos(θ/2), -sin(θ/2)], [sin(θ/2), cos(θ/2)]]`.
//! * `RZ(θ)` — rotation `diag(e^{-iθ/2}, e^{iθ/2})`.
//! * `CNOT(control, target)` — controlled X, `control != target`.

use num_complex::Complex64;
use std::f64::consts::FRAC_1_SQRT_2;
use thiserror::Error;

/// Largest register size the simulator accepts. A 24-qubit state already
/// holds 16M complex amplitudes (256 MiB); anything larger is out of scope
/// for this classifier, which needs at most one qubit per input feature.
pub const MAX_QUBITS: usize = 24;

/// Errors produced by register construction and gate application.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum SimulatorError {
    /// A gate referenced a qubit index outside the register.
    #[error("qubit {qubit} out of range for a {n_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },
    /// A CNOT named the same qubit as both control and target.
    #[error("cnot control and target are both qubit {qubit}")]
    ControlEqualsTarget { qubit: usize },
    /// Requested register size outside `1..=MAX_QUBITS`.
    #[error("register size {requested} outside the supported range 1..={MAX_QUBITS}")]
    RegisterSize { requested: usize },
}

/// A single concrete gate with bound angles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    /// Hadamard on one qubit.
    H { qubit: usize },
    /// Pauli X on one qubit.
    X { qubit: usize },
    /// Phase gate `diag(1, e^{i angle})`.
    Phase { qubit: usize, angle: f64 },
    /// Y-axis rotation by `angle`.
    Ry { qubit: usize, angle: f64 },
    /// Z-axis rotation by `angle`.
    Rz { qubit: usize, angle: f64 },
    /// Controlled X; flips `target` where `control` is `|1⟩`.
    Cnot { control: usize, target: usize },
}

/// Dense state of an `n`-qubit register.
///
/// Constructed in the all-zeros computational basis state and evolved by
/// [`Statevector::apply`]. The amplitude vector always has length
/// `2^n_qubits` and unit norm up to accumulated rounding (each gate is
/// unitary, so no renormalization is ever performed).
#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    /// Creates the register in `|0...0⟩`.
    pub fn zero(n_qubits: usize) -> Result<Self, SimulatorError> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(SimulatorError::RegisterSize {
                requested: n_qubits,
            });
        }
        let mut amps = vec![Complex64::ZERO; 1 << n_qubits];
        amps[0] = Complex64::ONE;
        Ok(Self { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Number of amplitudes, `2^n_qubits`.
    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    /// The raw amplitude vector, indexed per the module's LSB convention.
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// Applies one gate in place.
    ///
    /// Returns an error (leaving the state untouched) if the gate references
    /// a qubit outside the register or is a CNOT with `control == target`.
    pub fn apply(&mut self, gate: &Gate) -> Result<(), SimulatorError> {
        match *gate {
            Gate::H { qubit } => {
                self.check_qubit(qubit)?;
                self.apply_h(qubit);
            }
            Gate::X { qubit } => {
                self.check_qubit(qubit)?;
                self.apply_x(qubit);
            }
            Gate::Phase { qubit, angle } => {
                self.check_qubit(qubit)?;
                self.apply_phase(qubit, angle);
            }
            Gate::Ry { qubit, angle } => {
                self.check_qubit(qubit)?;
                self.apply_ry(qubit, angle);
            }
            Gate::Rz { qubit, angle } => {
                self.check_qubit(qubit)?;
                self.apply_rz(qubit, angle);
            }
            Gate::Cnot { control, target } => {
                self.check_qubit(control)?;
                self.check_qubit(target)?;
                if control == target {
                    return Err(SimulatorError::ControlEqualsTarget { qubit: control });
                }
                self.apply_cnot(control, target);
            }
        }
        Ok(())
    }

    /// Applies a gate sequence in order.
    pub fn apply_all(&mut self, gates: &[Gate]) -> Result<(), SimulatorError> {
        for gate in gates {
            self.apply(gate)?;
        }
        Ok(())
    }

    /// Born-rule probability of every basis state.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Probability mass on basis states of even and odd popcount.
    ///
    /// The odd component is the classifier's "class 1" readout: it sums
    /// `|amp|^2` over every basis index with an odd number of set bits. Both
    /// components are computed by direct summation, so they add up to the
    /// squared norm of the state.
    pub fn parity_probability(&self) -> (f64, f64) {
        let mut even = 0.0;
        let mut odd = 0.0;
        for (index, amp) in self.amps.iter().enumerate() {
            let p = amp.norm_sqr();
            if index.count_ones() % 2 == 0 {
                even += p;
            } else {
                odd += p;
            }
        }
        (even, odd)
    }

    /// Euclidean norm of the amplitude vector.
    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    fn check_qubit(&self, qubit: usize) -> Result<(), SimulatorError> {
        if qubit >= self.n_qubits {
            Err(SimulatorError::QubitOutOfRange {
                qubit,
                n_qubits: self.n_qubits,
            })
        } else {
            Ok(())
        }
    }

    /// Visits every amplitude pair `(i, i + stride)` where bit `qubit` of
    /// `i` is clear, the standard strided sweep for a single-qubit gate.
    /// The closure maps the (low, high) amplitudes to their new values.
    #[inline]
    fn for_each_pair(
        &mut self,
        qubit: usize,
        mut update: impl FnMut(Complex64, Complex64) -> (Complex64, Complex64),
    ) {
        let stride = 1usize << qubit;
        let dim = self.amps.len();
        let mut base = 0;
        while base < dim {
            for low in base..base + stride {
                let high = low + stride;
                let (a, b) = update(self.amps[low], self.amps[high]);
                self.amps[low] = a;
                self.amps[high] = b;
            }
            base += stride << 1;
        }
    }

    fn apply_h(&mut self, qubit: usize) {
        self.for_each_pair(qubit, |a, b| ((a + b) * FRAC_1_SQRT_2, (a - b) * FRAC_1_SQRT_2));
    }

    fn apply_x(&mut self, qubit: usize) {
        self.for_each_pair(qubit, |a, b| (b, a));
    }

    fn apply_phase(&mut self, qubit: usize, angle: f64) {
        let phase = Complex64::cis(angle);
        let stride = 1usize << qubit;
        let dim = self.amps.len();
        // Only amplitudes with the qubit's bit set pick up the phase.
        let mut base = stride;
        while base < dim {
            for amp in &mut self.amps[base..base + stride] {
                *amp *= phase;
            }
            base += stride << 1;
        }
    }

    fn apply_ry(&mut self, qubit: usize, angle: f64) {
        let c = (angle / 2.0).cos();
        let s = (angle / 2.0).sin();
        self.for_each_pair(qubit, |a, b| (a * c - b * s, a * s + b * c));
    }

    fn apply_rz(&mut self, qubit: usize, angle: f64) {
        let phase_low = Complex64::cis(-angle / 2.0);
        let phase_high = Complex64::cis(angle / 2.0);
        self.for_each_pair(qubit, |a, b| (a * phase_low, b * phase_high));
    }

    fn apply_cnot(&mut self, control: usize, target: usize) {
        let control_mask = 1usize << control;
        let stride = 1usize << target;
        let dim = self.amps.len();
        let mut base = 0;
        while base < dim {
            for low in base..base + stride {
                if low & control_mask != 0 {
                    self.amps.swap(low, low + stride);
                }
            }
            base += stride << 1;
        }
    }
}
