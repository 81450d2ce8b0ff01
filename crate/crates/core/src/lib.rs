//! A variational quantum classifier (VQC) for pulsar candidate screening.
//!
//! The crate provides everything needed to train and evaluate a binary VQC on
//! the HTRU-2 pulsar survey data using an exact statevector simulation:
//!
//! * [`simulator`] — a dense statevector simulator with a small gate set
//!   (H, X, P, RY, RZ, CNOT) and exact Born-rule readout.
//! * [`circuits`] — parameterized circuit templates: the ZZ and Pauli feature
//!   maps for data encoding and the RealAmplitudes / EfficientSU2 ansatze for
//!   trainable layers, with linear, circular, and full entanglement schemes.
//! * [`vqc`] — the classifier itself: parity readout, cross-entropy loss,
//!   parameter-shift gradients, and a deterministic seeded training loop.
//! * [`dataio`] — CSV ingestion for the HTRU-2 format, min-max scaling into
//!   the phase-encoding domain `[0, π]`, seeded train/test splits, and
//!   box-plot summary statistics.
//! * [`featselect`] — ANOVA F-score and Pearson-correlation feature rankings.
//! * [`metrics`] — confusion-matrix metrics suited to imbalanced data
//!   (accuracy, precision, recall, F1, and Matthews correlation).
//!
//! All stochastic steps (splits, weight initialization) are driven by explicit
//! seeds, so any experiment is reproducible bit for bit.

pub mod circuits;
pub mod dataio;
pub mod featselect;
pub mod metrics;
pub mod simulator;
pub mod vqc;

pub use circuits::{CircuitTemplate, EntanglementScheme};
pub use simulator::{Gate, Statevector};
pub use vqc::{AnsatzKind, FeatureMapKind, ModelSpec, TrainConfig, TrainReport, VqcModel};
