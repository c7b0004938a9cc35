//! Tabular datasets and their CSV / JSON encodings.

use std::io::Write;

use serde_json::{json, Value};

use super::args::Format;
use super::spec::RunSpec;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(usize),
    Label(String),
}

impl Cell {
    fn text(&self) -> String {
        match self {
            // `Display` for f64 is the shortest string that round-trips.
            Cell::Num(v) => v.to_string(),
            Cell::Int(v) => v.to_string(),
            Cell::Label(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) if v.is_finite() => json!(v),
            Cell::Num(v) => json!(v.to_string()),
            Cell::Int(v) => json!(v),
            Cell::Label(s) => json!(s),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Label(v.to_owned())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let out = |e: csv::Error| Error::Output(e.to_string());
        w.write_record(&self.columns).map_err(out)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::text)).map_err(out)?;
        }
        w.into_inner().map_err(|e| Error::Output(e.to_string()))
    }

    pub fn to_json(&self, spec: &RunSpec, extra: Value) -> Result<Vec<u8>> {
        let mut meta = serde_json::to_value(spec).map_err(|e| Error::Output(e.to_string()))?;
        if let (Value::Object(m), Value::Object(x)) = (&mut meta, extra) {
            m.extend(x);
        }
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
            .collect();
        let doc = json!({ "meta": meta, "columns": self.columns, "rows": rows });
        let mut bytes = serde_json::to_vec_pretty(&doc).map_err(|e| Error::Output(e.to_string()))?;
        bytes.push(b'\n');
        Ok(bytes)
    }

    /// Writes the table to `--out` or stdout in the requested format.
    pub fn emit(&self, spec: &RunSpec, extra: Value) -> Result<()> {
        let bytes = match spec.format {
            Format::Csv => self.to_csv()?,
            Format::Json => self.to_json(spec, extra)?,
        };
        match &spec.out {
            Some(path) => std::fs::write(path, bytes)?,
            None => std::io::stdout().lock().write_all(&bytes)?,
        }
        Ok(())
    }
}
