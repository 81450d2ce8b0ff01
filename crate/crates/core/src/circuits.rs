//! Parameterized circuit templates: feature maps and ansatze.
//!
//! A [`CircuitTemplate`] is an ordered list of instructions whose rotation
//! angles are expressions over two disjoint parameter classes: data
//! parameters `x{i}` (bound per sample by a feature map) and trainable
//! parameters `t{i}` (bound by the optimizer). [`CircuitTemplate::bind`]
//! substitutes concrete values and yields a flat [`Gate`] list for the
//! simulator, one gate per instruction.
//!
//! # Templates
//!
//! * [`zz_feature_map`] — per repetition: `H` on every qubit, a phase
//!   `P(2 x_i)` on every qubit, then for each entangled pair `(i, j)` the
//!   block `CNOT(i,j)`, `P(2 (π-x_i)(π-x_j))` on `j`, `CNOT(i,j)`.
//! * [`pauli_feature_map`] — the generalization to arbitrary one- and
//!   two-qubit Pauli labels; `[Z, ZZ]` (the default) reproduces the ZZ map
//!   instruction for instruction. `X`/`Y` labels wrap their blocks in the
//!   usual basis changes (`H` for X, `P(-π/2)`+`H` for Y).
//! * [`real_amplitudes`] — alternating `RY` rotation layers and CNOT
//!   entanglement layers; `n (reps+1)` trainable parameters.
//! * [`efficient_su2`] — like RealAmplitudes but each rotation layer is
//!   `RY` on every qubit followed by `RZ` on every qubit;
//!   `2 n (reps+1)` trainable parameters.
//!
//! Trainable parameters are indexed in emission order and used exactly once
//! each by the two ansatz families. A feature map can be reused as an ansatz
//! through [`CircuitTemplate::into_ansatz`], which reinterprets its data
//! parameters as trainable ones without touching the instruction order.
//!
//! # Entanglement schemes
//!
//! [`EntanglementScheme`] fixes which qubit pairs interact:
//! linear `(i, i+1)`; circular adds the closing pair `(n-1, 0)` ahead of the
//! linear pairs (collapsing to the single pair `(0, 1)` at `n = 2`, since
//! the interaction is symmetric in its endpoints); full takes all `i < j` in
//! lexicographic order.
//!
//! # Text dump
//!
//! [`CircuitTemplate::dump`] renders one instruction per line for golden
//! tests and inspection. The exact grammar:
//!
//! ```text
//! line   := "h" SP qubit
//!         | "x" SP qubit
//!         | "p" SP qubit SP angle
//!         | "ry" SP qubit SP angle
//!         | "rz" SP qubit SP angle
//!         | "cx" SP qubit SP qubit      (control first)
//! qubit  := "q" INT
//! angle  := NUMBER                      (constant, f64 display form)
//!         | [NUMBER "*"] param          (scaled parameter; "*" omitted when 1)
//!         | [NUMBER "*"] piprod
//! param  := "x" INT | "t" INT           (data / trainable)
//! piprod := "(pi-" param ")" { "*(pi-" param ")" }
//! ```

use crate::simulator::Gate;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CircuitError {
    /// Templates and pair schemes need at least two qubits.
    #[error("{n_qubits} qubit(s) is too few; templates need at least 2")]
    TooFewQubits { n_qubits: usize },
    /// Repetition counts start at 1.
    #[error("repetition count must be at least 1")]
    ZeroRepetitions,
    /// A Pauli label outside {X, Y, Z} with length 1..=2.
    #[error("invalid pauli label {label:?}: expected 1 or 2 characters from X, Y, Z")]
    InvalidPauliLabel { label: String },
    /// The Pauli feature map needs at least one label.
    #[error("pauli label list is empty")]
    EmptyPauliList,
    /// Wrong number of data values passed to `bind`.
    #[error("template takes {expected} data parameter(s), got {actual}")]
    DataLengthMismatch { expected: usize, actual: usize },
    /// Wrong number of weights passed to `bind`.
    #[error("template takes {expected} trainable parameter(s), got {actual}")]
    WeightLengthMismatch { expected: usize, actual: usize },
}

/// Which qubit pairs the entangling blocks act on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntanglementScheme {
    Linear,
    Circular,
    Full,
}

impl EntanglementScheme {
    /// The ordered `(control, target)` pair list for `n_qubits` qubits.
    pub fn pairs(self, n_qubits: usize) -> Result<Vec<(usize, usize)>, CircuitError> {
        if n_qubits < 2 {
            return Err(CircuitError::TooFewQubits { n_qubits });
        }
        let linear = || (0..n_qubits - 1).map(|i| (i, i + 1));
        Ok(match self {
            Self::Linear => linear().collect(),
            Self::Circular => {
                if n_qubits == 2 {
                    // The closing pair (1, 0) duplicates (0, 1) as an
                    // unordered pair, so only the linear pair remains.
                    vec![(0, 1)]
                } else {
                    std::iter::once((n_qubits - 1, 0)).chain(linear()).collect()
                }
            }
            Self::Full => (0..n_qubits)
                .flat_map(|i| (i + 1..n_qubits).map(move |j| (i, j)))
                .collect(),
        })
    }
}

impl fmt::Display for EntanglementScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Linear => "linear",
            Self::Circular => "circular",
            Self::Full => "full",
        })
    }
}

impl FromStr for EntanglementScheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "linear" => Ok(Self::Linear),
            "circular" => Ok(Self::Circular),
            "full" => Ok(Self::Full),
            other => Err(format!(
                "unknown entanglement scheme {other:?}; expected linear, circular, or full"
            )),
        }
    }
}

/// A reference to one parameter of a template.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParameterRef {
    /// Data parameter `x{0}` bound from a sample's features.
    Data(usize),
    /// Trainable parameter `t{0}` bound from the weight vector.
    Train(usize),
}

impl ParameterRef {
    fn value(self, data: &[f64], weights: &[f64]) -> f64 {
        match self {
            Self::Data(i) => data[i],
            Self::Train(i) => weights[i],
        }
    }
}

impl fmt::Display for ParameterRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Data(i) => write!(f, "x{i}"),
            Self::Train(i) => write!(f, "t{i}"),
        }
    }
}

/// A rotation-angle expression over template parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum AngleExpr {
    /// A fixed angle.
    Constant(f64),
    /// `coeff * param`.
    Scaled { coeff: f64, param: ParameterRef },
    /// `coeff * Π (π - param)` over `params`: the pair-interaction angle of
    /// the ZZ-style feature maps, named for the complement `π - x` of a
    /// value in the scaled data domain `[0, π]`.
    PiComplementProduct {
        coeff: f64,
        params: Vec<ParameterRef>,
    },
}

impl AngleExpr {
    /// Substitutes parameter values into the expression.
    pub fn evaluate(&self, data: &[f64], weights: &[f64]) -> f64 {
        match self {
            Self::Constant(value) => *value,
            Self::Scaled { coeff, param } => coeff * param.value(data, weights),
            Self::PiComplementProduct { coeff, params } => {
                coeff
                    * params
                        .iter()
                        .map(|p| PI - p.value(data, weights))
                        .product::<f64>()
            }
        }
    }

    /// Whether the expression mentions trainable parameter `k`.
    pub fn uses_train(&self, k: usize) -> bool {
        let hit = |p: &ParameterRef| matches!(p, ParameterRef::Train(i) if *i == k);
        match self {
            Self::Constant(_) => false,
            Self::Scaled { param, .. } => hit(param),
            Self::PiComplementProduct { params, .. } => params.iter().any(hit),
        }
    }

    /// Partial derivative of the bound angle with respect to trainable
    /// parameter `k`, evaluated at the given binding.
    pub fn train_partial(&self, k: usize, data: &[f64], weights: &[f64]) -> f64 {
        match self {
            Self::Constant(_) => 0.0,
            Self::Scaled { coeff, param } => {
                if param == &ParameterRef::Train(k) {
                    *coeff
                } else {
                    0.0
                }
            }
            Self::PiComplementProduct { coeff, params } => {
                // Product rule; each factor (π - t_k) contributes -1 times
                // the product of the remaining factors.
                let mut total = 0.0;
                for (at, param) in params.iter().enumerate() {
                    if param == &ParameterRef::Train(k) {
                        let rest: f64 = params
                            .iter()
                            .enumerate()
                            .filter(|(j, _)| *j != at)
                            .map(|(_, p)| PI - p.value(data, weights))
                            .product();
                        total -= coeff * rest;
                    }
                }
                total
            }
        }
    }

    fn map_params(&mut self, remap: impl Fn(ParameterRef) -> ParameterRef) {
        match self {
            Self::Constant(_) => {}
            Self::Scaled { param, .. } => *param = remap(*param),
            Self::PiComplementProduct { params, .. } => {
                for param in params {
                    *param = remap(*param);
                }
            }
        }
    }
}

impl fmt::Display for AngleExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant(value) => write!(f, "{value}"),
            Self::Scaled { coeff, param } => {
                if *coeff == 1.0 {
                    write!(f, "{param}")
                } else {
                    write!(f, "{coeff}*{param}")
                }
            }
            Self::PiComplementProduct { coeff, params } => {
                if *coeff != 1.0 {
                    write!(f, "{coeff}*")?;
                }
                for (i, param) in params.iter().enumerate() {
                    if i > 0 {
                        f.write_str("*")?;
                    }
                    write!(f, "(pi-{param})")?;
                }
                Ok(())
            }
        }
    }
}

/// One instruction of a template: a gate whose angle (if any) is still an
/// expression. `bind` turns each instruction into exactly one [`Gate`].
#[derive(Debug, Clone, PartialEq)]
pub enum TemplateOp {
    H { qubit: usize },
    X { qubit: usize },
    Phase { qubit: usize, angle: AngleExpr },
    Ry { qubit: usize, angle: AngleExpr },
    Rz { qubit: usize, angle: AngleExpr },
    Cnot { control: usize, target: usize },
}

impl TemplateOp {
    /// The instruction's angle expression, if it has one.
    pub fn angle(&self) -> Option<&AngleExpr> {
        match self {
            Self::Phase { angle, .. } | Self::Ry { angle, .. } | Self::Rz { angle, .. } => {
                Some(angle)
            }
            Self::H { .. } | Self::X { .. } | Self::Cnot { .. } => None,
        }
    }

    fn bind(&self, data: &[f64], weights: &[f64]) -> Gate {
        match self {
            Self::H { qubit } => Gate::H { qubit: *qubit },
            Self::X { qubit } => Gate::X { qubit: *qubit },
            Self::Phase { qubit, angle } => Gate::Phase {
                qubit: *qubit,
                angle: angle.evaluate(data, weights),
            },
            Self::Ry { qubit, angle } => Gate::Ry {
                qubit: *qubit,
                angle: angle.evaluate(data, weights),
            },
            Self::Rz { qubit, angle } => Gate::Rz {
                qubit: *qubit,
                angle: angle.evaluate(data, weights),
            },
            Self::Cnot { control, target } => Gate::Cnot {
                control: *control,
                target: *target,
            },
        }
    }

    fn write_line(&self, out: &mut String) {
        use fmt::Write;
        match self {
            Self::H { qubit } => write!(out, "h q{qubit}"),
            Self::X { qubit } => write!(out, "x q{qubit}"),
            Self::Phase { qubit, angle } => write!(out, "p q{qubit} {angle}"),
            Self::Ry { qubit, angle } => write!(out, "ry q{qubit} {angle}"),
            Self::Rz { qubit, angle } => write!(out, "rz q{qubit} {angle}"),
            Self::Cnot { control, target } => write!(out, "cx q{control} q{target}"),
        }
        .expect("writing to a String cannot fail");
    }
}

/// An ordered instruction list over `n_qubits` qubits with declared data and
/// trainable parameter counts.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitTemplate {
    n_qubits: usize,
    ops: Vec<TemplateOp>,
    num_data_params: usize,
    num_train_params: usize,
}

impl CircuitTemplate {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn ops(&self) -> &[TemplateOp] {
        &self.ops
    }

    pub fn num_data_params(&self) -> usize {
        self.num_data_params
    }

    pub fn num_train_params(&self) -> usize {
        self.num_train_params
    }

    /// Substitutes data values and weights, yielding one concrete gate per
    /// instruction, in instruction order.
    pub fn bind(&self, data: &[f64], weights: &[f64]) -> Result<Vec<Gate>, CircuitError> {
        if data.len() != self.num_data_params {
            return Err(CircuitError::DataLengthMismatch {
                expected: self.num_data_params,
                actual: data.len(),
            });
        }
        if weights.len() != self.num_train_params {
            return Err(CircuitError::WeightLengthMismatch {
                expected: self.num_train_params,
                actual: weights.len(),
            });
        }
        Ok(self.ops.iter().map(|op| op.bind(data, weights)).collect())
    }

    /// Reinterprets every data parameter as a trainable parameter, so a
    /// feature map can serve as the trainable ansatz. Data parameter `x{i}`
    /// becomes `t{base + i}` where `base` is the existing trainable count;
    /// instruction order is untouched.
    pub fn into_ansatz(mut self) -> Self {
        let base = self.num_train_params;
        for op in &mut self.ops {
            let remap = |p: ParameterRef| match p {
                ParameterRef::Data(i) => ParameterRef::Train(base + i),
                train => train,
            };
            match op {
                TemplateOp::Phase { angle, .. }
                | TemplateOp::Ry { angle, .. }
                | TemplateOp::Rz { angle, .. } => angle.map_params(remap),
                TemplateOp::H { .. } | TemplateOp::X { .. } | TemplateOp::Cnot { .. } => {}
            }
        }
        self.num_train_params = base + self.num_data_params;
        self.num_data_params = 0;
        self
    }

    /// Renders the instruction list in the module's text format, one line
    /// per instruction, with a trailing newline.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for op in &self.ops {
            op.write_line(&mut out);
            out.push('\n');
        }
        out
    }
}

/// One Pauli axis of a label character.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

/// A validated one- or two-character Pauli label such as `Z`, `ZZ`, or `XY`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PauliString(Vec<PauliAxis>);

impl PauliString {
    pub fn axes(&self) -> &[PauliAxis] {
        &self.0
    }
}

impl FromStr for PauliString {
    type Err = CircuitError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let invalid = || CircuitError::InvalidPauliLabel {
            label: s.to_string(),
        };
        if s.is_empty() || s.len() > 2 {
            return Err(invalid());
        }
        s.chars()
            .map(|c| match c.to_ascii_uppercase() {
                'X' => Ok(PauliAxis::X),
                'Y' => Ok(PauliAxis::Y),
                'Z' => Ok(PauliAxis::Z),
                _ => Err(invalid()),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(PauliString)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for axis in &self.0 {
            f.write_str(match axis {
                PauliAxis::X => "X",
                PauliAxis::Y => "Y",
                PauliAxis::Z => "Z",
            })?;
        }
        Ok(())
    }
}

/// The default label set `[Z, ZZ]`, which makes [`pauli_feature_map`]
/// coincide with [`zz_feature_map`].
pub fn default_pauli_labels() -> Vec<PauliString> {
    vec![
        PauliString(vec![PauliAxis::Z]),
        PauliString(vec![PauliAxis::Z, PauliAxis::Z]),
    ]
}

fn check_template_args(n_qubits: usize, reps: usize) -> Result<(), CircuitError> {
    if n_qubits < 2 {
        return Err(CircuitError::TooFewQubits { n_qubits });
    }
    if reps == 0 {
        return Err(CircuitError::ZeroRepetitions);
    }
    Ok(())
}

/// The second-order data-encoding map. See the module docs for the exact
/// per-repetition instruction sequence.
pub fn zz_feature_map(
    n_qubits: usize,
    reps: usize,
    scheme: EntanglementScheme,
) -> Result<CircuitTemplate, CircuitError> {
    check_template_args(n_qubits, reps)?;
    let pairs = scheme.pairs(n_qubits)?;
    let mut ops = Vec::new();
    for _ in 0..reps {
        for qubit in 0..n_qubits {
            ops.push(TemplateOp::H { qubit });
        }
        for qubit in 0..n_qubits {
            ops.push(TemplateOp::Phase {
                qubit,
                angle: AngleExpr::Scaled {
                    coeff: 2.0,
                    param: ParameterRef::Data(qubit),
                },
            });
        }
        for &(i, j) in &pairs {
            ops.push(TemplateOp::Cnot {
                control: i,
                target: j,
            });
            ops.push(TemplateOp::Phase {
                qubit: j,
                angle: AngleExpr::PiComplementProduct {
                    coeff: 2.0,
                    params: vec![ParameterRef::Data(i), ParameterRef::Data(j)],
                },
            });
            ops.push(TemplateOp::Cnot {
                control: i,
                target: j,
            });
        }
    }
    Ok(CircuitTemplate {
        n_qubits,
        ops,
        num_data_params: n_qubits,
        num_train_params: 0,
    })
}

/// Gates that rotate a qubit's `|0⟩/|1⟩` basis into the eigenbasis of the
/// given Pauli axis, emitted before a phase block; `undo` reverses them.
fn basis_change(axis: PauliAxis, qubit: usize, undo: bool, ops: &mut Vec<TemplateOp>) {
    match (axis, undo) {
        (PauliAxis::Z, _) => {}
        (PauliAxis::X, _) => ops.push(TemplateOp::H { qubit }),
        (PauliAxis::Y, false) => {
            ops.push(TemplateOp::Phase {
                qubit,
                angle: AngleExpr::Constant(-PI / 2.0),
            });
            ops.push(TemplateOp::H { qubit });
        }
        (PauliAxis::Y, true) => {
            ops.push(TemplateOp::H { qubit });
            ops.push(TemplateOp::Phase {
                qubit,
                angle: AngleExpr::Constant(PI / 2.0),
            });
        }
    }
}

/// The general Pauli data-encoding map over the given labels.
///
/// Single-character labels emit one (basis-changed) data phase per qubit;
/// two-character labels emit one entangled block per scheme pair, with the
/// first character's basis change on the pair's first qubit and the second
/// character's on its second.
pub fn pauli_feature_map(
    n_qubits: usize,
    reps: usize,
    scheme: EntanglementScheme,
    labels: &[PauliString],
) -> Result<CircuitTemplate, CircuitError> {
    check_template_args(n_qubits, reps)?;
    if labels.is_empty() {
        return Err(CircuitError::EmptyPauliList);
    }
    let pairs = scheme.pairs(n_qubits)?;
    let mut ops = Vec::new();
    for _ in 0..reps {
        for qubit in 0..n_qubits {
            ops.push(TemplateOp::H { qubit });
        }
        for label in labels {
            match *label.axes() {
                [axis] => {
                    for qubit in 0..n_qubits {
                        basis_change(axis, qubit, false, &mut ops);
                        ops.push(TemplateOp::Phase {
                            qubit,
                            angle: AngleExpr::Scaled {
                                coeff: 2.0,
                                param: ParameterRef::Data(qubit),
                            },
                        });
                        basis_change(axis, qubit, true, &mut ops);
                    }
                }
                [first, second] => {
                    for &(i, j) in &pairs {
                        basis_change(first, i, false, &mut ops);
                        basis_change(second, j, false, &mut ops);
                        ops.push(TemplateOp::Cnot {
                            control: i,
                            target: j,
                        });
                        ops.push(TemplateOp::Phase {
                            qubit: j,
                            angle: AngleExpr::PiComplementProduct {
                                coeff: 2.0,
                                params: vec![ParameterRef::Data(i), ParameterRef::Data(j)],
                            },
                        });
                        ops.push(TemplateOp::Cnot {
                            control: i,
                            target: j,
                        });
                        basis_change(second, j, true, &mut ops);
                        basis_change(first, i, true, &mut ops);
                    }
                }
                _ => unreachable!("PauliString construction enforces length 1..=2"),
            }
        }
    }
    Ok(CircuitTemplate {
        n_qubits,
        ops,
        num_data_params: n_qubits,
        num_train_params: 0,
    })
}

/// RY rotation layers separated by CNOT entanglement layers.
pub fn real_amplitudes(
    n_qubits: usize,
    reps: usize,
    scheme: EntanglementScheme,
) -> Result<CircuitTemplate, CircuitError> {
    check_template_args(n_qubits, reps)?;
    let pairs = scheme.pairs(n_qubits)?;
    let mut ops = Vec::new();
    let mut next_param = 0;
    let mut rotation_layer = |ops: &mut Vec<TemplateOp>| {
        for qubit in 0..n_qubits {
            ops.push(TemplateOp::Ry {
                qubit,
                angle: AngleExpr::Scaled {
                    coeff: 1.0,
                    param: ParameterRef::Train(next_param),
                },
            });
            next_param += 1;
        }
    };
    rotation_layer(&mut ops);
    for _ in 0..reps {
        for &(i, j) in &pairs {
            ops.push(TemplateOp::Cnot {
                control: i,
                target: j,
            });
        }
        rotation_layer(&mut ops);
    }
    Ok(CircuitTemplate {
        n_qubits,
        ops,
        num_data_params: 0,
        num_train_params: next_param,
    })
}

/// RY+RZ rotation layers separated by CNOT entanglement layers.
pub fn efficient_su2(
    n_qubits: usize,
    reps: usize,
    scheme: EntanglementScheme,
) -> Result<CircuitTemplate, CircuitError> {
    check_template_args(n_qubits, reps)?;
    let pairs = scheme.pairs(n_qubits)?;
    let mut ops = Vec::new();
    let mut next_param = 0;
    let mut rotation_layer = |ops: &mut Vec<TemplateOp>| {
        for qubit in 0..n_qubits {
            ops.push(TemplateOp::Ry {
                qubit,
                angle: AngleExpr::Scaled {
                    coeff: 1.0,
                    param: ParameterRef::Train(next_param),
                },
            });
            next_param += 1;
        }
        for qubit in 0..n_qubits {
            ops.push(TemplateOp::Rz {
                qubit,
                angle: AngleExpr::Scaled {
                    coeff: 1.0,
                    param: ParameterRef::Train(next_param),
                },
            });
            next_param += 1;
        }
    };
    rotation_layer(&mut ops);
    for _ in 0..reps {
        for &(i, j) in &pairs {
            ops.push(TemplateOp::Cnot {
                control: i,
                target: j,
            });
        }
        rotation_layer(&mut ops);
    }
    Ok(CircuitTemplate {
        n_qubits,
        ops,
        num_data_params: 0,
        num_train_params: next_param,
    })
}
