//! Canonical JSON: sorted keys, compact UTF-8, floats at 6 significant digits.

use serde::Serialize;
use serde_json::{Number, Value};

pub const SIGNIFICANT_DIGITS: usize = 6;

/// Rounds `x` to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .unwrap_or(x)
}

/// Rewrites every non-integer number in `value` to 6 significant digits.
pub fn canonicalize(value: Value) -> Value {
    match value {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or(0.0);
            Number::from_f64(round_sig(x)).map_or(Value::Null, Value::Number)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(canonicalize).collect()),
        Value::Object(map) => Value::Object(
            map.into_iter()
                .map(|(k, v)| (k, canonicalize(v)))
                .collect(),
        ),
        other => other,
    }
}

pub fn to_canonical_value<T: Serialize + ?Sized>(value: &T) -> serde_json::Result<Value> {
    Ok(canonicalize(serde_json::to_value(value)?))
}

pub fn to_canonical_bytes<T: Serialize + ?Sized>(value: &T) -> serde_json::Result<Vec<u8>> {
    serde_json::to_vec(&to_canonical_value(value)?)
}

pub fn to_canonical_string<T: Serialize + ?Sized>(value: &T) -> serde_json::Result<String> {
    serde_json::to_string(&to_canonical_value(value)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn keys_sorted_and_compact() {
        let v = json!({"b": 1, "a": {"z": [1, 2], "c": null}});
        assert_eq!(
            to_canonical_string(&v).unwrap(),
            r#"{"a":{"c":null,"z":[1,2]},"b":1}"#
        );
    }

    #[test]
    fn floats_rounded() {
        assert_eq!(round_sig(0.123456789), 0.123457);
        assert_eq!(round_sig(173.04999), 173.05);
        assert_eq!(round_sig(-1234567.0), -1234570.0);
        let v = json!({"x": 1.0 / 3.0, "n": 7});
        assert_eq!(to_canonical_string(&v).unwrap(), r#"{"n":7,"x":0.333333}"#);
    }

    #[test]
    fn canonicalization_is_idempotent() {
        let v = json!([0.1 + 0.2, 2.0_f64.sqrt(), 1e-12 / 3.0]);
        let once = canonicalize(v);
        assert_eq!(canonicalize(once.clone()), once);
    }
}
