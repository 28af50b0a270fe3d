//! Report emission. Keys come out sorted, so the same input always gives
//! the same bytes.

use k3_attractor::exact::QuadScalar;
use serde::Serialize;
use serde_json::{json, Map, Value};

pub fn value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

/// Replaces every non-integral exact scalar string by
/// `{"exact": ..., "approx": ...}` with a 15-digit decimal rendering.
pub fn with_floats(v: Value) -> Value {
    match v {
        Value::String(s) => match s.parse::<QuadScalar>() {
            Ok(x) if !x.is_integer() => json!({
                "exact": s,
                "approx": format!("{:.14e}", x.to_f64()),
            }),
            _ => Value::String(s),
        },
        Value::Array(xs) => Value::Array(xs.into_iter().map(with_floats).collect()),
        Value::Object(m) => Value::Object(
            m.into_iter()
                .map(|(k, x)| (k, with_floats(x)))
                .collect::<Map<_, _>>(),
        ),
        other => other,
    }
}

pub fn render(v: Value, float: bool) -> String {
    let v = if float { with_floats(v) } else { v };
    serde_json::to_string_pretty(&v).expect("json values render")
}
