//! Experiment configuration: optional values from a TOML file, optional
//! command-line overrides, and the validated form the runner consumes.
//!
//! A config file holds a `[defaults]` table and, for grids, any number of
//! `[[experiment]]` tables. Each experiment inherits the defaults and may
//! override any field; command-line flags override both. Enum-valued
//! fields are written as strings:
//!
//! - `selection`: `"fs1"` or `"fs2"`
//! - `entanglement`: `"linear"`, `"circular"`, or `"full"`
//! - `feature-map`: `"zz"`, `"pauli"` (default labels Z, ZZ), or
//!   `"pauli:<labels>"` with comma-separated Pauli strings such as
//!   `"pauli:z,xy"`
//! - `ansatz`: `"real-amplitudes"`, `"efficient-su2"`, `"feature-map"`
//!   (reuse the experiment's feature map), or `"feature-map:<spec>"` for
//!   an explicit one

use std::path::PathBuf;

use pulsar_vqc::circuits::{default_pauli_labels, EntanglementScheme, PauliString};
use pulsar_vqc::featselect::SelectionMethod;
use pulsar_vqc::vqc::{AnsatzKind, FeatureMapKind, TrainConfig};
use pulsar_vqc::ModelSpec;
use serde::Deserialize;
use thiserror::Error;

/// Smallest and largest usable feature counts. The lower bound comes from
/// the entanglement schemes (a pair needs two qubits); the upper bound is
/// the full feature set of the survey data.
pub const K_FEATURES_RANGE: std::ops::RangeInclusive<usize> = 2..=8;

const DEFAULT_K_FEATURES: usize = 3;
const DEFAULT_TRAIN_SIZE: usize = 300;
const DEFAULT_REPS: usize = 2;

/// Problems detected while reading, merging, or validating configuration.
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("failed to read config file {path}: {source}")]
    ReadFile {
        path: String,
        source: std::io::Error,
    },
    #[error("failed to parse config file {path}: {source}")]
    ParseFile {
        path: String,
        source: Box<toml::de::Error>,
    },
    #[error("no dataset path given (pass --data or set `data` in the config file)")]
    MissingDataset,
    #[error("no seed given (pass --seed or set `seed` in the config file)")]
    MissingSeed,
    #[error("k-features must be between 2 and 8, got {value}")]
    KFeaturesOutOfRange { value: usize },
    #[error("train-size must be positive")]
    ZeroTrainSize,
    #[error("test-size must be positive when given")]
    ZeroTestSize,
    #[error("reps must be at least 1")]
    ZeroReps,
    #[error("loss-tolerance must be finite and non-negative, got {value}")]
    BadLossTolerance { value: f64 },
    #[error("invalid selection method {value:?}: expected fs1 or fs2")]
    BadSelection { value: String },
    #[error("invalid entanglement {value:?}: expected linear, circular, or full")]
    BadEntanglement { value: String },
    #[error("invalid feature map {value:?}: {reason}")]
    BadFeatureMap { value: String, reason: String },
    #[error("invalid ansatz {value:?}: {reason}")]
    BadAnsatz { value: String, reason: String },
    #[error("invalid table format {value:?}: expected markdown or csv")]
    BadFormat { value: String },
    #[error("seeds must be at least 1")]
    ZeroSeeds,
    #[error("run takes a single experiment, but the config file has {count} [[experiment]] entries")]
    MultipleExperiments { count: usize },
}

/// One unresolved layer of configuration. Every field is optional so
/// layers can be stacked: file defaults, a grid entry, then flags.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ConfigValues {
    pub data: Option<PathBuf>,
    pub k_features: Option<usize>,
    pub selection: Option<String>,
    pub train_size: Option<usize>,
    pub test_size: Option<usize>,
    pub feature_map: Option<String>,
    pub ansatz: Option<String>,
    pub entanglement: Option<String>,
    pub reps: Option<usize>,
    pub seed: Option<u64>,
    pub max_iterations: Option<usize>,
    pub loss_tolerance: Option<f64>,
}

impl ConfigValues {
    /// Returns these values with every field present in `over` replacing
    /// the one here.
    pub fn merged(&self, over: &ConfigValues) -> ConfigValues {
        ConfigValues {
            data: over.data.clone().or_else(|| self.data.clone()),
            k_features: over.k_features.or(self.k_features),
            selection: over.selection.clone().or_else(|| self.selection.clone()),
            train_size: over.train_size.or(self.train_size),
            test_size: over.test_size.or(self.test_size),
            feature_map: over.feature_map.clone().or_else(|| self.feature_map.clone()),
            ansatz: over.ansatz.clone().or_else(|| self.ansatz.clone()),
            entanglement: over
                .entanglement
                .clone()
                .or_else(|| self.entanglement.clone()),
            reps: over.reps.or(self.reps),
            seed: over.seed.or(self.seed),
            max_iterations: over.max_iterations.or(self.max_iterations),
            loss_tolerance: over.loss_tolerance.or(self.loss_tolerance),
        }
    }

    /// Validates the stacked values and fills documented defaults.
    /// The dataset path and the seed have no defaults and must be present.
    pub fn resolve(&self) -> Result<ExperimentConfig, ConfigError> {
        let dataset_path = self.data.clone().ok_or(ConfigError::MissingDataset)?;
        let seed = self.seed.ok_or(ConfigError::MissingSeed)?;

        let k_features = self.k_features.unwrap_or(DEFAULT_K_FEATURES);
        if !K_FEATURES_RANGE.contains(&k_features) {
            return Err(ConfigError::KFeaturesOutOfRange { value: k_features });
        }
        let train_size = self.train_size.unwrap_or(DEFAULT_TRAIN_SIZE);
        if train_size == 0 {
            return Err(ConfigError::ZeroTrainSize);
        }
        if self.test_size == Some(0) {
            return Err(ConfigError::ZeroTestSize);
        }
        let reps = self.reps.unwrap_or(DEFAULT_REPS);
        if reps == 0 {
            return Err(ConfigError::ZeroReps);
        }
        let defaults = TrainConfig::default();
        let loss_tolerance = self.loss_tolerance.unwrap_or(defaults.loss_tolerance);
        if !loss_tolerance.is_finite() || loss_tolerance < 0.0 {
            return Err(ConfigError::BadLossTolerance {
                value: loss_tolerance,
            });
        }

        let selection = match &self.selection {
            None => SelectionMethod::Fs1,
            Some(text) => text.parse().map_err(|_| ConfigError::BadSelection {
                value: text.clone(),
            })?,
        };
        let entanglement = match &self.entanglement {
            None => EntanglementScheme::Circular,
            Some(text) => text.parse().map_err(|_| ConfigError::BadEntanglement {
                value: text.clone(),
            })?,
        };
        let feature_map = match &self.feature_map {
            None => FeatureMapKind::Zz,
            Some(text) => parse_feature_map(text)?,
        };
        let ansatz = match &self.ansatz {
            None => AnsatzKind::EfficientSu2,
            Some(text) => parse_ansatz(text, &feature_map)?,
        };

        Ok(ExperimentConfig {
            dataset_path,
            k_features,
            selection,
            train_size,
            test_size: self.test_size,
            feature_map,
            ansatz,
            entanglement,
            reps,
            seed,
            max_iterations: self.max_iterations.unwrap_or(defaults.max_iterations),
            loss_tolerance,
        })
    }
}

/// Contents of a config file: shared defaults plus optional grid entries.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ConfigFile {
    #[serde(default)]
    pub defaults: ConfigValues,
    #[serde(default, rename = "experiment")]
    pub experiments: Vec<ConfigValues>,
}

impl ConfigFile {
    /// Reads and parses a TOML config file.
    pub fn load(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::ReadFile {
            path: path.display().to_string(),
            source,
        })?;
        toml::from_str(&text).map_err(|source| ConfigError::ParseFile {
            path: path.display().to_string(),
            source: Box::new(source),
        })
    }

    /// Resolves the file into the single experiment a `run` invocation
    /// uses. At most one `[[experiment]]` entry may be present.
    pub fn single(&self, flags: &ConfigValues) -> Result<ExperimentConfig, ConfigError> {
        let base = match self.experiments.as_slice() {
            [] => self.defaults.clone(),
            [only] => self.defaults.merged(only),
            many => {
                return Err(ConfigError::MultipleExperiments { count: many.len() });
            }
        };
        base.merged(flags).resolve()
    }

    /// Resolves every `[[experiment]]` entry into a grid row. A file with
    /// no entries yields a one-row grid from the defaults alone.
    pub fn grid(&self, flags: &ConfigValues) -> Result<Vec<ExperimentConfig>, ConfigError> {
        if self.experiments.is_empty() {
            return Ok(vec![self.defaults.merged(flags).resolve()?]);
        }
        self.experiments
            .iter()
            .map(|entry| self.defaults.merged(entry).merged(flags).resolve())
            .collect()
    }
}

/// A fully validated experiment: one model family trained on one seeded
/// dataset split, evaluated on the held-out rows.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub dataset_path: PathBuf,
    pub k_features: usize,
    pub selection: SelectionMethod,
    pub train_size: usize,
    pub test_size: Option<usize>,
    pub feature_map: FeatureMapKind,
    pub ansatz: AnsatzKind,
    pub entanglement: EntanglementScheme,
    pub reps: usize,
    pub seed: u64,
    pub max_iterations: usize,
    pub loss_tolerance: f64,
}

impl ExperimentConfig {
    /// The circuit layout this experiment trains. The qubit count equals
    /// the number of selected features.
    pub fn model_spec(&self) -> ModelSpec {
        ModelSpec {
            n_qubits: self.k_features,
            reps: self.reps,
            entanglement: self.entanglement,
            feature_map: self.feature_map.clone(),
            ansatz: self.ansatz.clone(),
        }
    }

    /// The training budget for this experiment.
    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            max_iterations: self.max_iterations,
            loss_tolerance: self.loss_tolerance,
            seed: self.seed,
            ..TrainConfig::default()
        }
    }

    /// Short description used to attach config context to row errors.
    pub fn summary(&self) -> String {
        format!(
            "k={} {} train={} {} reps={} {} {} seed={}",
            self.k_features,
            self.selection,
            self.train_size,
            feature_map_label(&self.feature_map),
            self.reps,
            ansatz_label(&self.ansatz),
            self.entanglement,
            self.seed,
        )
    }
}

/// Human-readable name of a feature map, for tables and summaries.
pub fn feature_map_label(map: &FeatureMapKind) -> String {
    match map {
        FeatureMapKind::Zz => "ZZ".to_string(),
        FeatureMapKind::Pauli(labels) => {
            let joined: Vec<String> = labels.iter().map(PauliString::to_string).collect();
            format!("Pauli({})", joined.join(","))
        }
    }
}

/// Human-readable name of an ansatz, for tables and summaries.
pub fn ansatz_label(ansatz: &AnsatzKind) -> String {
    match ansatz {
        AnsatzKind::RealAmplitudes => "RealAmplitudes".to_string(),
        AnsatzKind::EfficientSu2 => "EfficientSU2".to_string(),
        AnsatzKind::FeatureMapAsAnsatz(map) => {
            format!("FeatureMap({})", feature_map_label(map))
        }
    }
}

/// Parses a feature-map spec string (`zz`, `pauli`, `pauli:<labels>`).
pub fn parse_feature_map(text: &str) -> Result<FeatureMapKind, ConfigError> {
    let bad = |reason: &str| ConfigError::BadFeatureMap {
        value: text.to_string(),
        reason: reason.to_string(),
    };
    let trimmed = text.trim();
    if trimmed.eq_ignore_ascii_case("zz") {
        return Ok(FeatureMapKind::Zz);
    }
    if trimmed.eq_ignore_ascii_case("pauli") {
        return Ok(FeatureMapKind::Pauli(default_pauli_labels()));
    }
    if let Some(rest) = strip_prefix_ignore_case(trimmed, "pauli:") {
        let labels = rest
            .split(',')
            .map(|label| label.trim().parse::<PauliString>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|err| bad(&err.to_string()))?;
        return Ok(FeatureMapKind::Pauli(labels));
    }
    Err(bad("expected zz, pauli, or pauli:<labels>"))
}

/// Parses an ansatz spec string. `feature-map` without an argument reuses
/// `encoding`, the experiment's feature map.
pub fn parse_ansatz(text: &str, encoding: &FeatureMapKind) -> Result<AnsatzKind, ConfigError> {
    let trimmed = text.trim();
    let normalized = trimmed.to_ascii_lowercase().replace(['-', '_'], "");
    match normalized.as_str() {
        "realamplitudes" => return Ok(AnsatzKind::RealAmplitudes),
        "efficientsu2" => return Ok(AnsatzKind::EfficientSu2),
        "featuremap" => return Ok(AnsatzKind::FeatureMapAsAnsatz(encoding.clone())),
        _ => {}
    }
    for prefix in ["feature-map:", "feature_map:", "featuremap:"] {
        if let Some(rest) = strip_prefix_ignore_case(trimmed, prefix) {
            let map = parse_feature_map(rest).map_err(|err| ConfigError::BadAnsatz {
                value: text.to_string(),
                reason: err.to_string(),
            })?;
            return Ok(AnsatzKind::FeatureMapAsAnsatz(map));
        }
    }
    Err(ConfigError::BadAnsatz {
        value: text.to_string(),
        reason: "expected real-amplitudes, efficient-su2, feature-map, or feature-map:<spec>"
            .to_string(),
    })
}

fn strip_prefix_ignore_case<'a>(text: &'a str, prefix: &str) -> Option<&'a str> {
    if text.len() >= prefix.len() && text[..prefix.len()].eq_ignore_ascii_case(prefix) {
        Some(&text[prefix.len()..])
    } else {
        None
    }
}

/// Builds the full sweep preset: every combination of feature count 2..=8,
/// both selection methods, both training sizes, both encoding families,
/// all three ansatz families, and all three entanglement schemes, each
/// inheriting dataset path, seed, and budget from `base`.
pub fn paper_grid(base: &ConfigValues) -> Result<Vec<ExperimentConfig>, ConfigError> {
    let template = base.resolve()?;
    let mut grid = Vec::new();
    for k_features in K_FEATURES_RANGE {
        for selection in [SelectionMethod::Fs1, SelectionMethod::Fs2] {
            for train_size in [180, 300] {
                for feature_map in [
                    FeatureMapKind::Zz,
                    FeatureMapKind::Pauli(default_pauli_labels()),
                ] {
                    for ansatz in [
                        AnsatzKind::RealAmplitudes,
                        AnsatzKind::EfficientSu2,
                        AnsatzKind::FeatureMapAsAnsatz(feature_map.clone()),
                    ] {
                        for entanglement in [
                            EntanglementScheme::Linear,
                            EntanglementScheme::Circular,
                            EntanglementScheme::Full,
                        ] {
                            grid.push(ExperimentConfig {
                                k_features,
                                selection,
                                train_size,
                                test_size: None,
                                feature_map: feature_map.clone(),
                                ansatz: ansatz.clone(),
                                entanglement,
                                ..template.clone()
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(grid)
}
