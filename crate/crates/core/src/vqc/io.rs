//! Plain-text model persistence.
//!
//! A model file is a list of `key=value` lines: a format tag, the circuit
//! descriptors (qubit count, repetitions, entanglement scheme, template
//! names, Pauli labels where applicable), and the weight vector. Weights are
//! written with the shortest decimal representation that parses back to the
//! identical float, so save/load round trips are exact. Blank lines and
//! lines starting with `#` are ignored.

use super::{AnsatzKind, FeatureMapKind, ModelSpec, VqcError, VqcModel};
use crate::circuits::PauliString;
use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;
use thiserror::Error;

const FORMAT_TAG: &str = "vqc-model-v1";

#[derive(Debug, Error)]
pub enum ModelIoError {
    #[error("could not read {path}: {source}")]
    Read {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("could not write {path}: {source}")]
    Write {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: expected key=value")]
    MalformedLine { line: usize },
    #[error("line {line}: {reason}")]
    BadValue { line: usize, reason: String },
    #[error("missing key {key:?}")]
    MissingKey { key: &'static str },
    #[error("unsupported model format {found:?}, expected {FORMAT_TAG:?}")]
    UnsupportedFormat { found: String },
    #[error(transparent)]
    Model(#[from] VqcError),
}

/// Writes the model to a file in the `key=value` format.
pub fn save_model(model: &VqcModel, path: impl AsRef<Path>) -> Result<(), ModelIoError> {
    let path = path.as_ref();
    std::fs::write(path, render(model)).map_err(|source| ModelIoError::Write {
        path: path.display().to_string(),
        source,
    })
}

/// Reads a model file back; the inverse of [`save_model`].
pub fn load_model(path: impl AsRef<Path>) -> Result<VqcModel, ModelIoError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ModelIoError::Read {
        path: path.display().to_string(),
        source,
    })?;
    parse(&text)
}

fn labels_value(labels: &[PauliString]) -> String {
    labels
        .iter()
        .map(PauliString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

fn render(model: &VqcModel) -> String {
    let spec = model.spec();
    let mut out = String::new();
    let mut line = |text: String| {
        out.push_str(&text);
        out.push('\n');
    };
    line(format!("format={FORMAT_TAG}"));
    line(format!("n_qubits={}", spec.n_qubits));
    line(format!("reps={}", spec.reps));
    line(format!("entanglement={}", spec.entanglement));
    match &spec.feature_map {
        FeatureMapKind::Zz => line("feature_map=zz".to_string()),
        FeatureMapKind::Pauli(labels) => {
            line("feature_map=pauli".to_string());
            line(format!("feature_map_labels={}", labels_value(labels)));
        }
    }
    match &spec.ansatz {
        AnsatzKind::RealAmplitudes => line("ansatz=real_amplitudes".to_string()),
        AnsatzKind::EfficientSu2 => line("ansatz=efficient_su2".to_string()),
        AnsatzKind::FeatureMapAsAnsatz(kind) => {
            line("ansatz=feature_map_as_ansatz".to_string());
            match kind {
                FeatureMapKind::Zz => line("ansatz_map=zz".to_string()),
                FeatureMapKind::Pauli(labels) => {
                    line("ansatz_map=pauli".to_string());
                    line(format!("ansatz_map_labels={}", labels_value(labels)));
                }
            }
        }
    }
    let mut weights = String::new();
    for (i, w) in model.weights().iter().enumerate() {
        if i > 0 {
            weights.push(',');
        }
        write!(weights, "{w}").expect("writing to a String cannot fail");
    }
    line(format!("weights={weights}"));
    out
}

type Entry = (usize, String);

fn take(entries: &mut HashMap<String, Entry>, key: &'static str) -> Result<Entry, ModelIoError> {
    entries
        .remove(key)
        .ok_or(ModelIoError::MissingKey { key })
}

fn parse_number<T: std::str::FromStr>((line, value): &Entry) -> Result<T, ModelIoError> {
    value.parse().map_err(|_| ModelIoError::BadValue {
        line: *line,
        reason: format!("could not parse {value:?} as a number"),
    })
}

fn parse_labels((line, value): &Entry) -> Result<Vec<PauliString>, ModelIoError> {
    if value.is_empty() {
        return Ok(Vec::new());
    }
    value
        .split(',')
        .map(|label| {
            label.trim().parse().map_err(|err| ModelIoError::BadValue {
                line: *line,
                reason: format!("{err}"),
            })
        })
        .collect()
}

fn parse_map_kind(
    entries: &mut HashMap<String, Entry>,
    kind_key: &'static str,
    labels_key: &'static str,
) -> Result<FeatureMapKind, ModelIoError> {
    let (line, value) = take(entries, kind_key)?;
    match value.as_str() {
        "zz" => Ok(FeatureMapKind::Zz),
        "pauli" => Ok(FeatureMapKind::Pauli(parse_labels(&take(
            entries, labels_key,
        )?)?)),
        other => Err(ModelIoError::BadValue {
            line,
            reason: format!("unknown feature map {other:?}"),
        }),
    }
}

fn parse(text: &str) -> Result<VqcModel, ModelIoError> {
    let mut entries: HashMap<String, Entry> = HashMap::new();
    for (at, raw) in text.lines().enumerate() {
        let line = at + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let Some((key, value)) = trimmed.split_once('=') else {
            return Err(ModelIoError::MalformedLine { line });
        };
        let key = key.trim().to_string();
        if entries
            .insert(key.clone(), (line, value.trim().to_string()))
            .is_some()
        {
            return Err(ModelIoError::BadValue {
                line,
                reason: format!("duplicate key {key:?}"),
            });
        }
    }

    let (_, format) = take(&mut entries, "format")?;
    if format != FORMAT_TAG {
        return Err(ModelIoError::UnsupportedFormat { found: format });
    }
    let n_qubits = parse_number(&take(&mut entries, "n_qubits")?)?;
    let reps = parse_number(&take(&mut entries, "reps")?)?;
    let scheme_entry = take(&mut entries, "entanglement")?;
    let entanglement = scheme_entry
        .1
        .parse()
        .map_err(|reason| ModelIoError::BadValue {
            line: scheme_entry.0,
            reason,
        })?;
    let feature_map = parse_map_kind(&mut entries, "feature_map", "feature_map_labels")?;
    let (ansatz_line, ansatz_value) = take(&mut entries, "ansatz")?;
    let ansatz = match ansatz_value.as_str() {
        "real_amplitudes" => AnsatzKind::RealAmplitudes,
        "efficient_su2" => AnsatzKind::EfficientSu2,
        "feature_map_as_ansatz" => AnsatzKind::FeatureMapAsAnsatz(parse_map_kind(
            &mut entries,
            "ansatz_map",
            "ansatz_map_labels",
        )?),
        other => {
            return Err(ModelIoError::BadValue {
                line: ansatz_line,
                reason: format!("unknown ansatz {other:?}"),
            })
        }
    };
    let weights_entry = take(&mut entries, "weights")?;
    let weights: Vec<f64> = if weights_entry.1.is_empty() {
        Vec::new()
    } else {
        weights_entry
            .1
            .split(',')
            .map(|w| {
                w.trim().parse().map_err(|_| ModelIoError::BadValue {
                    line: weights_entry.0,
                    reason: format!("could not parse weight {w:?}"),
                })
            })
            .collect::<Result<_, _>>()?
    };

    if let Some((key, (line, _))) = entries.iter().min_by_key(|(_, (line, _))| *line) {
        return Err(ModelIoError::BadValue {
            line: *line,
            reason: format!("unknown key {key:?}"),
        });
    }

    let mut model = VqcModel::new(ModelSpec {
        n_qubits,
        reps,
        entanglement,
        feature_map,
        ansatz,
    })?;
    model.set_weights(weights)?;
    Ok(model)
}
