use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};

/// One table cell. Reals are emitted with 12 significant digits.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Text(String),
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Int(v) => Some(*v as f64),
            Cell::Real(v) => Some(*v),
            Cell::Text(_) => None,
        }
    }

    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Real(v) => format_real(*v),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Real(v) if v.is_finite() => json!(v),
            Cell::Real(v) => json!(format_real(*v)),
            Cell::Text(s) => json!(s),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        Cell::Real(v.unwrap_or(f64::NAN))
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// Scientific notation with 12 significant digits; `nan`, `inf`, `-inf`
/// for non-finite values.
pub fn format_real(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{:.11e}", if v == 0.0 { 0.0 } else { v })
    }
}

/// Rows of one experiment under a fixed header.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<Cell>>,
    /// Extra `key: value` metadata such as fitted coefficients.
    notes: Vec<(String, String)>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new(), notes: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::Dimension(format!("row has {} cells for {} columns", row.len(), self.columns.len())));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn note(&mut self, key: &str, value: String) {
        self.notes.push((key.into(), value));
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn notes(&self) -> &[(String, String)] {
        &self.notes
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::InvalidParameter(format!("no column named `{name}`")))
    }

    /// Numeric values of a column.
    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        let i = self.column_index(name)?;
        self.rows
            .iter()
            .map(|r| r[i].as_f64().ok_or_else(|| Error::InvalidParameter(format!("column `{name}` is not numeric"))))
            .collect()
    }

    /// Text of a cell, if it holds text.
    pub fn text(&self, row: usize, name: &str) -> Result<&str> {
        let i = self.column_index(name)?;
        match &self.rows[row][i] {
            Cell::Text(s) => Ok(s),
            _ => Err(Error::InvalidParameter(format!("column `{name}` is not text"))),
        }
    }

    /// CSV body preceded by `#` metadata lines.
    pub fn to_csv(&self, metadata: &Metadata) -> String {
        let mut out = String::new();
        for line in metadata.lines() {
            out.push_str("# ");
            out.push_str(&line);
            out.push('\n');
        }
        for (k, v) in &self.notes {
            out.push_str(&format!("# {k}: {v}\n"));
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self, metadata: &Metadata) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| Value::Object(self.columns.iter().cloned().zip(row.iter().map(Cell::json)).collect()))
            .collect();
        let notes: serde_json::Map<String, Value> = self.notes.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
        let doc = json!({ "metadata": metadata, "notes": notes, "columns": self.columns, "rows": rows });
        let mut text = serde_json::to_string_pretty(&doc).expect("table serialises");
        text.push('\n');
        text
    }
}

/// Provenance block written ahead of the data.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metadata {
    pub tool: String,
    pub version: String,
    pub experiment: String,
    pub seed: u64,
    /// The resolved spec as a config document.
    pub spec: String,
}

impl Metadata {
    fn lines(&self) -> Vec<String> {
        let mut lines = vec![
            format!("tool: {} {}", self.tool, self.version),
            format!("experiment: {}", self.experiment),
            format!("seed: {}", self.seed),
            "spec:".to_string(),
        ];
        lines.extend(self.spec.lines().map(|l| format!("  {l}")));
        lines
    }
}
