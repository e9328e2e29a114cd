//! JSON file formats: instances, measures, and scalar encoding.

use std::fs;
use std::path::Path;

use quadra_core::{Atom, Measure, Mode, MomentSequence, Scalar};
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// A number in an input file: an integer, a decimal, or a `"p/q"` string.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Number {
    /// Exact value of the literal. JSON floats are read through their
    /// shortest decimal form, so `0.1` becomes `1/10`.
    pub fn to_scalar(&self) -> Result<Scalar, String> {
        match self {
            Number::Int(n) => Ok(Scalar::from(*n)),
            Number::Float(x) => Scalar::parse_exact(&format!("{x:?}")).map_err(|e| e.to_string()),
            Number::Text(s) => Scalar::parse_exact(s).map_err(|e| e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FileMode {
    #[default]
    Exact,
    Float,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub moments: Vec<Number>,
    #[serde(default)]
    pub prescribed_nodes: Vec<Number>,
    #[serde(default)]
    pub d2: Option<usize>,
    #[serde(default)]
    pub allow_infinity: bool,
    #[serde(default)]
    pub mode: FileMode,
}

/// A parsed instance, with every number converted to the requested mode.
#[derive(Debug, Clone)]
pub struct Instance {
    pub moments: MomentSequence,
    pub prescribed: Vec<Scalar>,
    pub d2: Option<usize>,
    pub allow_infinity: bool,
}

fn scalars(values: &[Number], what: &str, mode: Mode) -> Result<Vec<Scalar>, String> {
    values
        .iter()
        .enumerate()
        .map(|(i, v)| {
            v.to_scalar()
                .map(|s| s.to_mode(mode))
                .map_err(|e| format!("{what}[{i}]: {e}"))
        })
        .collect()
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn parse_json<T: for<'de> Deserialize<'de>>(path: &Path, text: &str) -> Result<T, String> {
    serde_json::from_str(text).map_err(|e| {
        format!(
            "{}: line {} column {}: {e}",
            path.display(),
            e.line(),
            e.column()
        )
    })
}

pub fn load_instance(path: &Path, force_float: bool) -> Result<Instance, String> {
    let file: InstanceFile = parse_json(path, &read(path)?)?;
    let mode = if force_float || file.mode == FileMode::Float {
        Mode::Float
    } else {
        Mode::Exact
    };
    let at = |e: String| format!("{}: {e}", path.display());
    let moments = MomentSequence::new(scalars(&file.moments, "moments", mode).map_err(at)?)
        .map_err(|e| at(e.to_string()))?;
    let prescribed = scalars(&file.prescribed_nodes, "prescribed_nodes", mode).map_err(at)?;
    Ok(Instance {
        moments,
        prescribed,
        d2: file.d2,
        allow_infinity: file.allow_infinity,
    })
}

#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct AtomEntry {
    pub node: Value,
    pub weight: Value,
}

/// Either a measure file (`atoms`) or a solve report (`nodes`, `weights`).
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum MeasureInput {
    Atoms { atoms: Vec<AtomEntry> },
    Report { nodes: Vec<Value>, weights: Vec<Value> },
}

fn is_infinity(v: &Value) -> bool {
    matches!(v.as_str(), Some(s) if matches!(s.to_ascii_lowercase().as_str(), "infinity" | "inf" | "∞"))
}

fn value_scalar(v: &Value) -> Result<Scalar, String> {
    match v {
        Value::Number(n) if n.is_i64() => Ok(Scalar::from(n.as_i64().unwrap())),
        Value::Number(n) => Ok(Scalar::Float(n.as_f64().unwrap_or(f64::NAN))),
        Value::String(s) => Scalar::parse_exact(s).map_err(|e| e.to_string()),
        other => Err(format!("expected a number, got {other}")),
    }
}

pub fn load_measure(path: &Path) -> Result<Measure, String> {
    let input: MeasureInput = parse_json(path, &read(path)?)?;
    let pairs: Vec<(Value, Value)> = match input {
        MeasureInput::Atoms { atoms } => atoms.into_iter().map(|a| (a.node, a.weight)).collect(),
        MeasureInput::Report { nodes, weights } => {
            if nodes.len() != weights.len() {
                return Err(format!(
                    "{}: {} nodes but {} weights",
                    path.display(),
                    nodes.len(),
                    weights.len()
                ));
            }
            nodes.into_iter().zip(weights).collect()
        }
    };
    let atoms = pairs
        .iter()
        .enumerate()
        .map(|(i, (node, weight))| {
            let atom = if is_infinity(node) {
                Atom::Infinity
            } else {
                Atom::Real(value_scalar(node).map_err(|e| format!("atom {i}: {e}"))?)
            };
            Ok((atom, value_scalar(weight).map_err(|e| format!("weight {i}: {e}"))?))
        })
        .collect::<Result<Vec<_>, String>>()
        .map_err(|e| format!("{}: {e}", path.display()))?;
    Measure::new(atoms).map_err(|e| format!("{}: {e}", path.display()))
}

/// Exact values as `"p/q"` strings, floats as shortest round-trip numbers.
pub fn scalar_json(s: &Scalar) -> Value {
    match s {
        Scalar::Exact(_) => Value::String(s.to_string()),
        Scalar::Float(x) => serde_json::Number::from_f64(*x)
            .map(Value::Number)
            .unwrap_or_else(|| Value::String(format!("{x}"))),
    }
}

pub fn scalars_json(values: &[Scalar]) -> Value {
    Value::Array(values.iter().map(scalar_json).collect())
}

pub fn atom_json(atom: &Atom) -> Value {
    match atom {
        Atom::Real(x) => scalar_json(x),
        Atom::Infinity => Value::String("infinity".into()),
    }
}

pub fn measure_json(measure: &Measure) -> Value {
    let atoms: Vec<AtomEntry> = measure
        .atoms()
        .iter()
        .map(|(a, w)| AtomEntry {
            node: atom_json(a),
            weight: scalar_json(w),
        })
        .collect();
    serde_json::json!({ "atoms": atoms })
}

pub fn instance_json(gamma: &MomentSequence, prescribed: &[Scalar], d2: usize, allow_infinity: bool) -> Value {
    serde_json::json!({
        "moments": scalars_json(gamma.as_slice()),
        "prescribed_nodes": scalars_json(prescribed),
        "d2": d2,
        "allow_infinity": allow_infinity,
        "mode": FileMode::Exact,
    })
}
