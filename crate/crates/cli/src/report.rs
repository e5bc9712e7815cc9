//! Deterministic JSON reports.

use serde::Serialize;
use serde_json::{Map, Number, Value};

use crate::error::CliError;

pub const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Debug, Default)]
pub struct Report {
    command: String,
    inputs: Map<String, Value>,
    outputs: Map<String, Value>,
    warnings: Vec<String>,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Self {
        Report {
            command: command.into(),
            ..Default::default()
        }
    }

    pub fn input(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        self.inputs.insert(key.to_string(), to_value(value));
        self
    }

    /// Records the result of `operation` under its name.
    pub fn output(&mut self, operation: &str, value: impl Serialize) -> &mut Self {
        self.outputs.insert(operation.to_string(), to_value(value));
        self
    }

    pub fn warn(&mut self, message: impl Into<String>) -> &mut Self {
        self.warnings.push(message.into());
        self
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        let v = serde_json::json!({
            "command": self.command,
            "inputs": Value::Object(self.inputs.clone()),
            "outputs": Value::Object(self.outputs.clone()),
            "warnings": self.warnings,
        });
        Ok(serde_json::to_string_pretty(&round_value(v))?)
    }
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

/// Rounds `x` to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().unwrap_or(x)
}

/// `x` with [`SIGNIFICANT_DIGITS`] significant digits, for CSV cells.
pub fn fmt_sig(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        let r = round_sig(x);
        let a = r.abs();
        if a != 0.0 && !(1e-5..1e16).contains(&a) { format!("{r:e}") } else { r.to_string() }
    }
}

/// Rounds every float in a JSON tree. Object keys come out sorted because
/// `serde_json::Map` is ordered by key.
fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            Number::from_f64(round_sig(x)).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_value).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, round_value(v))).collect()),
        other => other,
    }
}
