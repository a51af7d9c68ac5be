//! Deterministic serialization: floats at 17 significant digits, object
//! keys sorted, CSV through a fixed column order.

use crate::error::{Error, Result};
use serde::Serialize;
use serde_json::{Map, Number, Value};
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

/// 17 significant digits in scientific notation; `inf`, `-inf`, `nan` otherwise.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn number(x: f64) -> Value {
    Number::from_str(&fmt_f64(x)).map_or(Value::Null, Value::Number)
}

fn canonical(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => number(n.as_f64().unwrap_or(f64::NAN)),
        Value::Array(items) => Value::Array(items.into_iter().map(canonical).collect()),
        // serde_json's default map is ordered by key.
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, canonical(v))).collect::<Map<_, _>>()),
        other => other,
    }
}

/// JSON value with every float rewritten at 17 significant digits. Non-finite
/// floats, which JSON cannot carry, serialize as null.
pub fn to_value<T: Serialize>(value: &T) -> Result<Value> {
    Ok(canonical(serde_json::to_value(value)?))
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&to_value(value)?)?;
    s.push('\n');
    Ok(s)
}

/// CSV with a header row; every cell is already formatted text.
pub fn to_csv(header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Input(format!("csv: {e}"));
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.write_record(r).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Input(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Input(format!("csv: {e}")))
}

pub fn opt_cell<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// Writes to `path`, or to `out` when no path is given.
pub fn emit(content: &str, path: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, content)?,
        None => out.write_all(content.as_bytes())?,
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn floats_and_key_order() {
        let s = to_json(&json!({"b": 0.1, "a": [1, 2.5, f64::INFINITY], "c": 3})).unwrap();
        assert!(s.find("\"a\"").unwrap() < s.find("\"b\"").unwrap());
        assert!(s.contains("1.0000000000000001e-1"), "{s}");
        assert!(s.contains("2.5000000000000000e+0"));
        assert!(s.contains("\"c\": 3"));
        assert!(s.contains("null"));
        let v: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["b"].as_f64().unwrap(), 0.1);
    }

    #[test]
    fn csv_quoting() {
        let s = to_csv(&["name", "value"], &[vec!["a, b".into(), fmt_f64(1.0)]]).unwrap();
        assert_eq!(s, "name,value\n\"a, b\",1.0000000000000000e0\n");
    }
}
