//! Reading problems from JSON.

use std::fmt;

use boxalg::{BoxMatrix, BoxVector, LimitScalar};
use serde_json::Value;

/// A malformed input, with the JSON path of the offending value.
#[derive(Debug, Clone, PartialEq)]
pub struct InputError {
    pub path: String,
    pub message: String,
}

impl InputError {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        InputError {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

pub type InputResult<T> = Result<T, InputError>;

/// Parses the whole document, reporting syntax errors by line and column.
pub fn parse_document(text: &str) -> InputResult<Value> {
    serde_json::from_str(text).map_err(|e| {
        InputError::new(
            format!("line {}, column {}", e.line(), e.column()),
            format!("malformed JSON ({e})"),
        )
    })
}

/// A problem object together with the path used in error messages.
pub struct Problem<'a> {
    value: &'a Value,
    path: String,
}

impl<'a> Problem<'a> {
    pub fn new(value: &'a Value, path: impl Into<String>) -> InputResult<Self> {
        let path = path.into();
        if !value.is_object() {
            return Err(InputError::new(path, "expected a JSON object"));
        }
        Ok(Problem { value, path })
    }

    pub fn path(&self) -> &str {
        &self.path
    }

    pub fn at(&self, key: &str) -> String {
        if self.path.is_empty() {
            key.to_string()
        } else {
            format!("{}.{}", self.path, key)
        }
    }

    pub fn get(&self, key: &str) -> Option<&'a Value> {
        self.value.get(key)
    }

    fn require(&self, key: &str) -> InputResult<&'a Value> {
        self.get(key)
            .ok_or_else(|| InputError::new(self.at(key), "missing field"))
    }

    pub fn scalar(&self, key: &str) -> InputResult<LimitScalar> {
        scalar(self.require(key)?, &self.at(key))
    }

    pub fn vector(&self, key: &str) -> InputResult<BoxVector> {
        vector(self.require(key)?, &self.at(key))
    }

    pub fn matrix(&self, key: &str) -> InputResult<BoxMatrix> {
        matrix(self.require(key)?, &self.at(key))
    }

    pub fn vectors(&self, key: &str) -> InputResult<Vec<BoxVector>> {
        let path = self.at(key);
        array(self.require(key)?, &path)?
            .iter()
            .enumerate()
            .map(|(i, v)| vector(v, &format!("{path}[{i}]")))
            .collect()
    }

    pub fn optional_vectors(&self, key: &str) -> InputResult<Vec<BoxVector>> {
        match self.get(key) {
            Some(_) => self.vectors(key),
            None => Ok(Vec::new()),
        }
    }

    /// A single scalar or a list of scalars.
    pub fn scalars(&self, key: &str) -> InputResult<Vec<LimitScalar>> {
        let path = self.at(key);
        match self.get(key) {
            None => Ok(Vec::new()),
            Some(Value::Array(items)) => items
                .iter()
                .enumerate()
                .map(|(i, v)| scalar(v, &format!("{path}[{i}]")))
                .collect(),
            Some(v) => Ok(vec![scalar(v, &path)?]),
        }
    }

    pub fn string(&self, key: &str) -> InputResult<Option<&'a str>> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s)),
            Some(_) => Err(InputError::new(self.at(key), "expected a string")),
        }
    }

    pub fn options(&self) -> InputResult<Option<Problem<'a>>> {
        self.get("options")
            .map(|v| Problem::new(v, self.at("options")))
            .transpose()
    }

    pub fn u32(&self, key: &str) -> InputResult<Option<u32>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .as_u64()
                .and_then(|n| u32::try_from(n).ok())
                .map(Some)
                .ok_or_else(|| InputError::new(self.at(key), "expected a nonnegative integer")),
        }
    }

    pub fn f64(&self, key: &str) -> InputResult<Option<f64>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .as_f64()
                .map(Some)
                .ok_or_else(|| InputError::new(self.at(key), "expected a number")),
        }
    }
}

fn array<'a>(value: &'a Value, path: &str) -> InputResult<&'a Vec<Value>> {
    match value {
        Value::Array(items) if !items.is_empty() => Ok(items),
        Value::Array(_) => Err(InputError::new(path, "expected a nonempty array")),
        _ => Err(InputError::new(path, "expected an array")),
    }
}

/// A rational string `-?\d+(/\d+)?` or a JSON number, read exactly.
pub fn scalar(value: &Value, path: &str) -> InputResult<LimitScalar> {
    match value {
        Value::String(s) => {
            let valid = {
                let body = s.strip_prefix('-').unwrap_or(s);
                let (num, den) = body.split_once('/').unwrap_or((body, "1"));
                [num, den]
                    .iter()
                    .all(|part| !part.is_empty() && part.bytes().all(|b| b.is_ascii_digit()))
            };
            if !valid {
                return Err(InputError::new(path, format!("{s:?} is not a rational literal")));
            }
            s.parse()
                .map_err(|e: boxalg::BoxError| InputError::new(path, e.to_string()))
        }
        Value::Number(n) => LimitScalar::from_decimal_str(&n.to_string())
            .map_err(|e| InputError::new(path, e.to_string())),
        _ => Err(InputError::new(path, "expected a rational string or a number")),
    }
}

pub fn vector(value: &Value, path: &str) -> InputResult<BoxVector> {
    let entries = array(value, path)?
        .iter()
        .enumerate()
        .map(|(i, v)| scalar(v, &format!("{path}[{i}]")))
        .collect::<InputResult<Vec<_>>>()?;
    BoxVector::new(entries).map_err(|e| InputError::new(path, e.to_string()))
}

pub fn matrix(value: &Value, path: &str) -> InputResult<BoxMatrix> {
    let rows = array(value, path)?
        .iter()
        .enumerate()
        .map(|(i, row)| Ok(vector(row, &format!("{path}[{i}]"))?.into_inner()))
        .collect::<InputResult<Vec<_>>>()?;
    let width = rows[0].len();
    if let Some(i) = rows.iter().position(|r| r.len() != width) {
        return Err(InputError::new(
            format!("{path}[{i}]"),
            format!("row has {} entries, expected {width}", rows[i].len()),
        ));
    }
    BoxMatrix::from_rows(rows).map_err(|e| InputError::new(path, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn rationals_and_numbers() {
        assert_eq!(scalar(&json!("-3/6"), "x").unwrap(), LimitScalar::ratio(-1, 2));
        assert_eq!(scalar(&json!(0.25), "x").unwrap(), LimitScalar::ratio(1, 4));
        assert_eq!(scalar(&json!(7), "x").unwrap(), LimitScalar::from_int(7));
    }

    #[test]
    fn malformed_rationals_name_their_position() {
        let m = json!([[1, 2], [3, "4/x"]]);
        let err = matrix(&m, "A").unwrap_err();
        assert_eq!(err.path, "A[1][1]");
        assert!(scalar(&json!("+1"), "x").is_err());
        assert!(scalar(&json!("1/0"), "x").is_err());
    }

    #[test]
    fn ragged_matrices_are_rejected() {
        let err = matrix(&json!([[1, 2], [3]]), "A").unwrap_err();
        assert_eq!(err.path, "A[1]");
    }

    #[test]
    fn syntax_errors_carry_line_and_column() {
        let err = parse_document("{\"A\": [1,\n 2,, 3]}").unwrap_err();
        assert!(err.path.starts_with("line 2, column"), "{}", err.path);
    }
}
