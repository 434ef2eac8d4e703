//! JSON rendering: exact rationals as strings, with a float mirror.

use boxalg::eigen::RegionValue;
use boxalg::{BoxMatrix, BoxVector, LimitScalar, SignedLog};
use serde_json::{json, Map, Value};

pub fn scalar(x: &LimitScalar) -> Value {
    Value::String(x.to_string())
}

pub fn vector(v: &BoxVector) -> Value {
    Value::Array(v.iter().map(scalar).collect())
}

pub fn scalars(xs: &[LimitScalar]) -> Value {
    Value::Array(xs.iter().map(scalar).collect())
}

pub fn matrix(a: &BoxMatrix) -> Value {
    Value::Array(a.row_iter().map(scalars).collect())
}

/// A finite-p value: its float rendering plus sign and log-magnitude, which
/// survive where the float overflows.
pub fn signed_log(x: SignedLog) -> Value {
    json!({
        "value": x.to_f64(),
        "sign": x.sign(),
        "log_abs": if x.is_zero() { Value::Null } else { json!(x.logmag()) },
    })
}

pub fn region_value(x: &RegionValue) -> Value {
    match x {
        RegionValue::Exact(v) => scalar(v),
        RegionValue::Approx(f) => json!(f),
    }
}

fn as_rational(s: &str) -> Option<LimitScalar> {
    let body = s.strip_prefix('-').unwrap_or(s);
    let (num, den) = body.split_once('/').unwrap_or((body, "1"));
    let digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
    if digits(num) && digits(den) {
        s.parse().ok()
    } else {
        None
    }
}

/// The same document with every rational string replaced by its float value.
pub fn float_mirror(value: &Value) -> Value {
    match value {
        Value::String(s) => as_rational(s).map_or_else(|| value.clone(), |x| json!(x.to_f64())),
        Value::Array(items) => Value::Array(items.iter().map(float_mirror).collect()),
        Value::Object(map) => Value::Object(
            map.iter()
                .map(|(k, v)| (k.clone(), float_mirror(v)))
                .collect::<Map<_, _>>(),
        ),
        other => other.clone(),
    }
}

/// Attaches the float mirror under `"float"`.
pub fn with_floats(exact: Value) -> Value {
    match exact {
        Value::Object(mut map) => {
            let mirror = float_mirror(&Value::Object(map.clone()));
            map.insert("float".into(), mirror);
            Value::Object(map)
        }
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_render_canonically() {
        assert_eq!(scalar(&LimitScalar::ratio(6, -4)), json!("-3/2"));
        assert_eq!(scalar(&LimitScalar::from_int(5)), json!("5"));
    }

    #[test]
    fn mirror_converts_only_rationals() {
        let doc = json!({"x": ["1/4", "-2"], "class": "balanced", "n": 3});
        assert_eq!(
            float_mirror(&doc),
            json!({"x": [0.25, -2.0], "class": "balanced", "n": 3})
        );
    }
}
