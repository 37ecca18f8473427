//! Result rows and their CSV/JSON rendering.

use std::fs;
use std::io;
use std::path::Path;

use serde_json::{json, Map, Value as Json};

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Num(f64),
    Int(i64),
    Bool(bool),
    Str(String),
    Null,
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Self::Num(v)
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Self::Int(v as i64)
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Self::Bool(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Self::Str(v.to_string())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Self::Str(v)
    }
}

impl<T: Into<Value>> From<Option<T>> for Value {
    fn from(v: Option<T>) -> Self {
        v.map_or(Self::Null, Into::into)
    }
}

/// Round-trip decimal with 17 significant digits.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

impl Value {
    pub fn to_cell(&self) -> String {
        match self {
            Self::Num(x) => format_float(*x),
            Self::Int(i) => i.to_string(),
            Self::Bool(b) => b.to_string(),
            Self::Str(s) => s.clone(),
            Self::Null => String::new(),
        }
    }

    pub fn to_json(&self) -> Json {
        match self {
            Self::Num(x) if x.is_finite() => json!(x),
            Self::Num(x) => json!(format_float(*x)),
            Self::Int(i) => json!(i),
            Self::Bool(b) => json!(b),
            Self::Str(s) => json!(s),
            Self::Null => Json::Null,
        }
    }
}

/// Flat record with columns in insertion order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Row {
    pub cells: Vec<(&'static str, Value)>,
}

impl Row {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, key: &'static str, v: impl Into<Value>) -> Self {
        self.cells.push((key, v.into()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.cells.iter().find(|(k, _)| *k == key).map(|(_, v)| v)
    }
}

/// Union of the row keys in first-appearance order.
pub fn header(rows: &[Row]) -> Vec<&'static str> {
    let mut out: Vec<&'static str> = Vec::new();
    for r in rows {
        for (k, _) in &r.cells {
            if !out.contains(k) {
                out.push(k);
            }
        }
    }
    out
}

pub fn write_csv(path: &Path, rows: &[Row]) -> io::Result<()> {
    let cols = header(rows);
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(&cols)?;
    for r in rows {
        w.write_record(cols.iter().map(|k| r.get(k).map_or(String::new(), Value::to_cell)))?;
    }
    w.flush()
}

pub fn rows_json(rows: &[Row]) -> Json {
    Json::Array(
        rows.iter()
            .map(|r| Json::Object(r.cells.iter().map(|(k, v)| (k.to_string(), v.to_json())).collect::<Map<_, _>>()))
            .collect(),
    )
}

pub fn write_json(path: &Path, value: &Json) -> io::Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(io::Error::other)?;
    text.push('\n');
    fs::write(path, text)
}
