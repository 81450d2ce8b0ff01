//! Seeded gradient-descent training for [`VqcModel`].
//!
//! The optimizer is plain steepest descent with an Armijo backtracking line
//! search. Every accepted step strictly decreases the loss, so the recorded
//! history is non-increasing, and all arithmetic is sequential over a fixed
//! sample order, so a given config reproduces its result bit for bit.

use super::{VqcError, VqcModel};
use ndarray::ArrayView2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

/// Sufficient-decrease constant for the line search.
const ARMIJO_C: f64 = 1e-4;
/// Step halvings tried before declaring no descent possible.
const MAX_HALVINGS: u32 = 60;

/// The available minimizers. Gradient descent with backtracking is the
/// default and currently only choice; the enum keeps the configuration
/// surface explicit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OptimizerKind {
    #[default]
    GradientDescent,
}

/// How the weight vector is drawn before the first iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitStrategy {
    /// Uniform on `[-π, π)` from the seeded generator; avoids the saddle
    /// that an all-zero start can sit on.
    #[default]
    UniformSymmetric,
    Zeros,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub max_iterations: usize,
    /// Absolute loss improvement under which one accepted step counts as
    /// converged.
    pub loss_tolerance: f64,
    pub seed: u64,
    pub optimizer: OptimizerKind,
    pub init: InitStrategy,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            max_iterations: 300,
            loss_tolerance: 1e-6,
            seed: 0,
            optimizer: OptimizerKind::GradientDescent,
            init: InitStrategy::UniformSymmetric,
        }
    }
}

/// What a training run did. The first history entry is the initial loss,
/// so the history is one longer than `iterations_used`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub final_weights: Vec<f64>,
    pub loss_history: Vec<f64>,
    pub iterations_used: usize,
    pub converged: bool,
}

impl VqcModel {
    /// Minimizes the cross-entropy loss over the given samples, installing
    /// the final weights in the model.
    ///
    /// Exhausting `max_iterations` is a normal outcome reported with
    /// `converged: false`, including a zero-iteration budget, which just
    /// reports the initial loss. A non-finite initial loss is an error.
    pub fn train(
        &mut self,
        features: ArrayView2<'_, f64>,
        labels: &[u8],
        cfg: &TrainConfig,
    ) -> Result<TrainReport, VqcError> {
        let OptimizerKind::GradientDescent = cfg.optimizer;
        let states = self.encode_all(features, labels)?;
        let mut weights = initial_weights(self.num_weights(), cfg);
        let mut loss = self.loss_for_weights(&states, labels, &weights)?;
        if !loss.is_finite() {
            return Err(VqcError::InitializationFailure);
        }

        let mut history = vec![loss];
        let mut iterations_used = 0;
        let mut converged = false;
        let mut last_step: f64 = 1.0;
        for _ in 0..cfg.max_iterations {
            let grad = self.gradient_for_weights(&states, labels, &weights)?;
            let grad_sq: f64 = grad.iter().map(|g| g * g).sum();
            if grad_sq == 0.0 {
                converged = true;
                break;
            }

            // Backtracking from twice the previously accepted step, capped
            // at 1, so the step size can recover after a cautious stretch.
            let mut t = (2.0 * last_step).min(1.0);
            let mut accepted = None;
            for _ in 0..MAX_HALVINGS {
                let candidate: Vec<f64> = weights
                    .iter()
                    .zip(&grad)
                    .map(|(w, g)| w - t * g)
                    .collect();
                let candidate_loss = self.loss_for_weights(&states, labels, &candidate)?;
                if candidate_loss <= loss - ARMIJO_C * t * grad_sq {
                    accepted = Some((candidate, candidate_loss));
                    break;
                }
                t /= 2.0;
            }
            let Some((new_weights, new_loss)) = accepted else {
                // No scale produced sufficient decrease; the iterate is as
                // good as this method can make it.
                converged = true;
                break;
            };

            let improvement = loss - new_loss;
            weights = new_weights;
            loss = new_loss;
            last_step = t;
            history.push(loss);
            iterations_used += 1;
            if improvement < cfg.loss_tolerance {
                converged = true;
                break;
            }
        }

        self.weights = weights.clone();
        Ok(TrainReport {
            final_weights: weights,
            loss_history: history,
            iterations_used,
            converged,
        })
    }
}

fn initial_weights(count: usize, cfg: &TrainConfig) -> Vec<f64> {
    match cfg.init {
        InitStrategy::Zeros => vec![0.0; count],
        InitStrategy::UniformSymmetric => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            (0..count).map(|_| rng.random_range(-PI..PI)).collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::EntanglementScheme;
    use crate::vqc::{AnsatzKind, FeatureMapKind, ModelSpec};
    use ndarray::{array, Array2};

    fn toy_model() -> VqcModel {
        VqcModel::new(ModelSpec {
            n_qubits: 2,
            reps: 1,
            entanglement: EntanglementScheme::Linear,
            feature_map: FeatureMapKind::Zz,
            ansatz: AnsatzKind::RealAmplitudes,
        })
        .unwrap()
    }

    /// Ten samples whose class is decided by the first feature alone:
    /// 1 iff x0 > π/2.
    fn separable_toy_set() -> (Array2<f64>, Vec<u8>) {
        let features = array![
            [0.20, 1.10],
            [0.50, 2.70],
            [0.90, 0.30],
            [1.10, 1.90],
            [0.70, 2.20],
            [2.10, 0.80],
            [2.20, 2.90],
            [2.60, 1.40],
            [3.00, 0.10],
            [2.90, 2.50],
        ];
        let labels = vec![0, 0, 0, 0, 0, 1, 1, 1, 1, 1];
        (features, labels)
    }

    #[test]
    fn training_fits_a_separable_toy_set_on_some_seed() {
        let (features, labels) = separable_toy_set();
        let mut best = 0usize;
        for seed in [0, 1, 2] {
            let mut model = VqcModel::new(ModelSpec {
                n_qubits: 2,
                reps: 1,
                entanglement: EntanglementScheme::Linear,
                feature_map: FeatureMapKind::Zz,
                ansatz: AnsatzKind::EfficientSu2,
            })
            .unwrap();
            let cfg = TrainConfig {
                max_iterations: 200,
                seed,
                ..TrainConfig::default()
            };
            model.train(features.view(), &labels, &cfg).unwrap();
            let correct = features
                .outer_iter()
                .zip(&labels)
                .filter(|(row, &label)| {
                    model.predict(row.as_slice().unwrap()).unwrap() == label
                })
                .count();
            best = best.max(correct);
            if correct == labels.len() {
                return;
            }
        }
        panic!("no seed reached training accuracy 1.0; best {best}/10");
    }

    #[test]
    fn training_is_bit_for_bit_deterministic() {
        let (features, labels) = separable_toy_set();
        let cfg = TrainConfig {
            max_iterations: 25,
            seed: 11,
            ..TrainConfig::default()
        };
        let mut first = toy_model();
        let mut second = toy_model();
        let a = first.train(features.view(), &labels, &cfg).unwrap();
        let b = second.train(features.view(), &labels, &cfg).unwrap();
        assert_eq!(a, b);
        let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a.final_weights), bits(&b.final_weights));
        assert_eq!(bits(&a.loss_history), bits(&b.loss_history));
    }

    #[test]
    fn loss_history_never_increases() {
        let (features, labels) = separable_toy_set();
        let mut model = toy_model();
        let cfg = TrainConfig {
            max_iterations: 60,
            seed: 3,
            ..TrainConfig::default()
        };
        let report = model.train(features.view(), &labels, &cfg).unwrap();
        assert_eq!(report.loss_history.len(), report.iterations_used + 1);
        for pair in report.loss_history.windows(2) {
            assert!(pair[1] <= pair[0], "history increased: {pair:?}");
        }
    }

    #[test]
    fn final_weights_are_installed_in_the_model() {
        let (features, labels) = separable_toy_set();
        let mut model = toy_model();
        let cfg = TrainConfig {
            max_iterations: 10,
            seed: 4,
            ..TrainConfig::default()
        };
        let report = model.train(features.view(), &labels, &cfg).unwrap();
        assert_eq!(model.weights(), report.final_weights.as_slice());
    }

    #[test]
    fn zero_iteration_budget_reports_without_error() {
        let (features, labels) = separable_toy_set();
        let mut model = toy_model();
        let cfg = TrainConfig {
            max_iterations: 0,
            seed: 0,
            ..TrainConfig::default()
        };
        let report = model.train(features.view(), &labels, &cfg).unwrap();
        assert_eq!(report.iterations_used, 0);
        assert!(!report.converged);
        assert_eq!(report.loss_history.len(), 1);
    }

    #[test]
    fn loose_tolerance_converges_after_one_accepted_step() {
        let (features, labels) = separable_toy_set();
        let mut model = toy_model();
        let cfg = TrainConfig {
            max_iterations: 100,
            loss_tolerance: 10.0,
            seed: 0,
            ..TrainConfig::default()
        };
        let report = model.train(features.view(), &labels, &cfg).unwrap();
        assert!(report.converged);
        assert_eq!(report.iterations_used, 1);
    }

    #[test]
    fn non_finite_initial_loss_is_an_initialization_error() {
        let mut model = toy_model();
        let features = array![[f64::NAN, 0.2]];
        let err = model
            .train(features.view(), &[0], &TrainConfig::default())
            .unwrap_err();
        assert_eq!(err, VqcError::InitializationFailure);
    }

    #[test]
    fn zeros_init_strategy_starts_at_the_origin() {
        let (features, labels) = separable_toy_set();
        let mut model = toy_model();
        let cfg = TrainConfig {
            max_iterations: 0,
            init: InitStrategy::Zeros,
            ..TrainConfig::default()
        };
        model.train(features.view(), &labels, &cfg).unwrap();
        assert!(model.weights().iter().all(|&w| w == 0.0));
    }
}
