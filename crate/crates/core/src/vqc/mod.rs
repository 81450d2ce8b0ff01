//! The hybrid classifier: a data-encoding feature map composed with a
//! trainable ansatz, read out through the parity of the measured bitstring.
//!
//! [`VqcModel::forward`] binds the feature map to one scaled sample and the
//! ansatz to the current weights, runs both on `|0…0⟩`, and returns the
//! odd-parity probability `p1`, interpreted as the probability of class 1.
//! [`VqcModel::predict`] thresholds at `p1 > 0.5`, so an exact tie goes to
//! class 0, the majority class of the survey.
//!
//! Training minimizes the clamped binary cross entropy with an exact
//! gradient. The gradient applies the parameter-shift rule per rotation
//! gate (`∂p/∂λ = [p(λ+π/2) − p(λ−π/2)] / 2`, valid for the P, RY, and RZ
//! gates alike since P differs from RZ only by a global phase) and chains
//! through each gate angle's partial derivative with respect to the
//! weights. The per-gate chaining matters for a feature map reused as the
//! ansatz, where one weight can appear in several gates, scaled or inside
//! pair-interaction products.

mod io;
mod optimizer;

pub use io::{load_model, save_model, ModelIoError};
pub use optimizer::{InitStrategy, OptimizerKind, TrainConfig, TrainReport};

use crate::circuits::{
    efficient_su2, pauli_feature_map, real_amplitudes, zz_feature_map, CircuitError,
    CircuitTemplate, EntanglementScheme, PauliString,
};
use crate::simulator::{Gate, SimulatorError, Statevector, MAX_QUBITS};
use ndarray::ArrayView2;
use std::f64::consts::FRAC_PI_2;
use thiserror::Error;

/// Probability clamp for the loss; keeps `ln` finite at `p1 ∈ {0, 1}`,
/// both of which are exactly reachable.
pub const PROB_CLAMP: f64 = 1e-10;

#[derive(Debug, Error, PartialEq)]
pub enum VqcError {
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Simulator(#[from] SimulatorError),
    #[error("weight vector has {actual} entr(ies), ansatz takes {expected}")]
    WeightCount { expected: usize, actual: usize },
    #[error("sample matrix has {x_rows} row(s) but {y_len} label(s)")]
    SampleCountMismatch { x_rows: usize, y_len: usize },
    #[error("no samples provided")]
    NoSamples,
    #[error("label at row {row} is {value}, expected 0 or 1")]
    NonBinaryLabel { row: usize, value: u8 },
    #[error("initial loss is not finite")]
    InitializationFailure,
}

/// Which data-encoding template the model uses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FeatureMapKind {
    Zz,
    Pauli(Vec<PauliString>),
}

impl FeatureMapKind {
    fn build(
        &self,
        n_qubits: usize,
        reps: usize,
        scheme: EntanglementScheme,
    ) -> Result<CircuitTemplate, CircuitError> {
        match self {
            Self::Zz => zz_feature_map(n_qubits, reps, scheme),
            Self::Pauli(labels) => pauli_feature_map(n_qubits, reps, scheme, labels),
        }
    }
}

/// Which trainable template the model uses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnsatzKind {
    RealAmplitudes,
    EfficientSu2,
    /// Reuse a feature-map template with its data parameters reinterpreted
    /// as weights.
    FeatureMapAsAnsatz(FeatureMapKind),
}

impl AnsatzKind {
    fn build(
        &self,
        n_qubits: usize,
        reps: usize,
        scheme: EntanglementScheme,
    ) -> Result<CircuitTemplate, CircuitError> {
        match self {
            Self::RealAmplitudes => real_amplitudes(n_qubits, reps, scheme),
            Self::EfficientSu2 => efficient_su2(n_qubits, reps, scheme),
            Self::FeatureMapAsAnsatz(kind) => kind
                .build(n_qubits, reps, scheme)
                .map(CircuitTemplate::into_ansatz),
        }
    }
}

/// Everything needed to rebuild a model's circuit structure. One repetition
/// count covers both templates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelSpec {
    pub n_qubits: usize,
    pub reps: usize,
    pub entanglement: EntanglementScheme,
    pub feature_map: FeatureMapKind,
    pub ansatz: AnsatzKind,
}

/// A feature map, an ansatz, and the ansatz's current weights.
#[derive(Debug, Clone, PartialEq)]
pub struct VqcModel {
    spec: ModelSpec,
    feature_map: CircuitTemplate,
    ansatz: CircuitTemplate,
    weights: Vec<f64>,
}

impl VqcModel {
    /// Builds both templates from the spec; weights start at zero.
    pub fn new(spec: ModelSpec) -> Result<Self, VqcError> {
        if spec.n_qubits > MAX_QUBITS {
            return Err(SimulatorError::RegisterSize {
                requested: spec.n_qubits,
            }
            .into());
        }
        let feature_map = spec
            .feature_map
            .build(spec.n_qubits, spec.reps, spec.entanglement)?;
        let ansatz = spec
            .ansatz
            .build(spec.n_qubits, spec.reps, spec.entanglement)?;
        let weights = vec![0.0; ansatz.num_train_params()];
        Ok(Self {
            spec,
            feature_map,
            ansatz,
            weights,
        })
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn n_qubits(&self) -> usize {
        self.spec.n_qubits
    }

    pub fn feature_map(&self) -> &CircuitTemplate {
        &self.feature_map
    }

    pub fn ansatz(&self) -> &CircuitTemplate {
        &self.ansatz
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn num_weights(&self) -> usize {
        self.ansatz.num_train_params()
    }

    pub fn set_weights(&mut self, weights: Vec<f64>) -> Result<(), VqcError> {
        if weights.len() != self.num_weights() {
            return Err(VqcError::WeightCount {
                expected: self.num_weights(),
                actual: weights.len(),
            });
        }
        self.weights = weights;
        Ok(())
    }

    /// Odd-parity probability of the circuit output for one scaled sample,
    /// read as the probability of class 1.
    pub fn forward(&self, x: &[f64]) -> Result<f64, VqcError> {
        let state = self.encode(x)?;
        let gates = self.bound_ansatz(&self.weights)?;
        p1_after(&state, &gates).map_err(Into::into)
    }

    /// Class decision for one scaled sample.
    pub fn predict(&self, x: &[f64]) -> Result<u8, VqcError> {
        self.forward(x).map(threshold_label)
    }

    /// Mean clamped binary cross entropy over a sample matrix.
    pub fn cross_entropy_loss(
        &self,
        features: ArrayView2<'_, f64>,
        labels: &[u8],
    ) -> Result<f64, VqcError> {
        let states = self.encode_all(features, labels)?;
        self.loss_for_weights(&states, labels, &self.weights)
    }

    /// Exact gradient of [`Self::cross_entropy_loss`] with respect to the
    /// weights, one entry per trainable parameter.
    pub fn loss_gradient(
        &self,
        features: ArrayView2<'_, f64>,
        labels: &[u8],
    ) -> Result<Vec<f64>, VqcError> {
        let states = self.encode_all(features, labels)?;
        self.gradient_for_weights(&states, labels, &self.weights)
    }

    /// Runs the feature map on one sample.
    fn encode(&self, x: &[f64]) -> Result<Statevector, VqcError> {
        let gates = self.feature_map.bind(x, &[])?;
        let mut state = Statevector::zero(self.spec.n_qubits)?;
        state.apply_all(&gates)?;
        Ok(state)
    }

    /// Runs the feature map on every sample row. The encoded states do not
    /// depend on the weights, so training computes them once and reuses
    /// them for every loss and gradient evaluation.
    fn encode_all(
        &self,
        features: ArrayView2<'_, f64>,
        labels: &[u8],
    ) -> Result<Vec<Statevector>, VqcError> {
        check_samples(features, labels)?;
        features
            .outer_iter()
            .map(|row| match row.as_slice() {
                Some(x) => self.encode(x),
                None => self.encode(&row.to_vec()),
            })
            .collect()
    }

    fn bound_ansatz(&self, weights: &[f64]) -> Result<Vec<Gate>, VqcError> {
        self.ansatz.bind(&[], weights).map_err(Into::into)
    }

    fn loss_for_weights(
        &self,
        states: &[Statevector],
        labels: &[u8],
        weights: &[f64],
    ) -> Result<f64, VqcError> {
        let gates = self.bound_ansatz(weights)?;
        let mut total = 0.0;
        for (state, &label) in states.iter().zip(labels) {
            total += bce_term(p1_after(state, &gates)?, label);
        }
        Ok(total / states.len() as f64)
    }

    fn gradient_for_weights(
        &self,
        states: &[Statevector],
        labels: &[u8],
        weights: &[f64],
    ) -> Result<Vec<f64>, VqcError> {
        let gates = self.bound_ansatz(weights)?;
        let ops = self.ansatz.ops();
        // Ansatz gate positions whose angle involves at least one weight,
        // with that weight list. Constant angles (basis changes in a reused
        // feature map) contribute nothing and are skipped.
        let mut shift_sites: Vec<(usize, Vec<usize>)> = Vec::new();
        for (at, op) in ops.iter().enumerate() {
            if let Some(angle) = op.angle() {
                let involved: Vec<usize> =
                    (0..weights.len()).filter(|&k| angle.uses_train(k)).collect();
                if !involved.is_empty() {
                    shift_sites.push((at, involved));
                }
            }
        }

        let mut grad = vec![0.0; weights.len()];
        let scale = 1.0 / states.len() as f64;
        for (state, &label) in states.iter().zip(labels) {
            let p1 = p1_after(state, &gates)?;
            let dloss_dp = bce_dp(p1, label);
            if dloss_dp == 0.0 {
                continue;
            }
            for (at, involved) in &shift_sites {
                let mut shifted = gates.clone();
                shifted[*at] = shift_gate_angle(gates[*at], FRAC_PI_2);
                let plus = p1_after(state, &shifted)?;
                shifted[*at] = shift_gate_angle(gates[*at], -FRAC_PI_2);
                let minus = p1_after(state, &shifted)?;
                let dp_dangle = (plus - minus) / 2.0;
                if dp_dangle == 0.0 {
                    continue;
                }
                let angle = ops[*at].angle().expect("shift sites carry an angle");
                for &k in involved {
                    grad[k] +=
                        scale * dloss_dp * angle.train_partial(k, &[], weights) * dp_dangle;
                }
            }
        }
        Ok(grad)
    }
}

fn check_samples(features: ArrayView2<'_, f64>, labels: &[u8]) -> Result<(), VqcError> {
    if features.nrows() == 0 {
        return Err(VqcError::NoSamples);
    }
    if features.nrows() != labels.len() {
        return Err(VqcError::SampleCountMismatch {
            x_rows: features.nrows(),
            y_len: labels.len(),
        });
    }
    if let Some(row) = labels.iter().position(|&l| l > 1) {
        return Err(VqcError::NonBinaryLabel {
            row,
            value: labels[row],
        });
    }
    Ok(())
}

fn p1_after(state: &Statevector, gates: &[Gate]) -> Result<f64, SimulatorError> {
    let mut run = state.clone();
    run.apply_all(gates)?;
    Ok(run.parity_probability().1)
}

fn threshold_label(p1: f64) -> u8 {
    u8::from(p1 > 0.5)
}

/// One sample's clamped cross-entropy term.
fn bce_term(p1: f64, label: u8) -> f64 {
    let p = p1.clamp(PROB_CLAMP, 1.0 - PROB_CLAMP);
    if label == 1 {
        -p.ln()
    } else {
        -(1.0 - p).ln()
    }
}

/// Derivative of [`bce_term`] with respect to `p1`; zero in the clamped
/// regions, where the term is locally constant.
fn bce_dp(p1: f64, label: u8) -> f64 {
    if !(PROB_CLAMP..=1.0 - PROB_CLAMP).contains(&p1) {
        return 0.0;
    }
    (p1 - f64::from(label)) / (p1 * (1.0 - p1))
}

fn shift_gate_angle(gate: Gate, delta: f64) -> Gate {
    match gate {
        Gate::Phase { qubit, angle } => Gate::Phase {
            qubit,
            angle: angle + delta,
        },
        Gate::Ry { qubit, angle } => Gate::Ry {
            qubit,
            angle: angle + delta,
        },
        Gate::Rz { qubit, angle } => Gate::Rz {
            qubit,
            angle: angle + delta,
        },
        other => other,
    }
}
