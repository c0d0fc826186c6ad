//! Tabular output with a header block, as CSV or JSON.

use std::io::Write;

use anyhow::Result;
use serde_json::{json, Map, Value};

use crate::config::{Format, RunConfig, RESULT_PREFIX};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Bool(bool),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            // 17 significant digits round-trip every f64.
            Cell::Num(v) if v.is_finite() => format!("{v:.16e}"),
            Cell::Num(v) => format!("{v}"),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) if v.is_finite() => json!(v),
            Cell::Num(_) => Value::Null,
            Cell::Int(v) => json!(v),
            Cell::Bool(b) => json!(b),
            Cell::Text(s) => json!(s),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Summary values recorded in the header as `result.<key>`.
    pub results: Vec<(&'static str, Cell)>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table { columns: columns.to_vec(), ..Table::default() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn result(&mut self, key: &'static str, value: impl Into<Cell>) {
        self.results.push((key, value.into()));
    }

    pub fn write(&self, cfg: &RunConfig, version: &str, format: Format, out: &mut dyn Write) -> Result<()> {
        match format {
            Format::Csv => self.write_csv(cfg, version, out),
            Format::Json => self.write_json(cfg, version, out),
        }
    }

    fn write_csv(&self, cfg: &RunConfig, version: &str, out: &mut dyn Write) -> Result<()> {
        for (k, v) in cfg.header_lines(version) {
            writeln!(out, "{}", format!("# {k} = {v}").trim_end())?;
        }
        for (k, v) in &self.results {
            writeln!(out, "# {RESULT_PREFIX}{k} = {}", v.csv())?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv))?;
        }
        w.flush()?;
        Ok(())
    }

    fn write_json(&self, cfg: &RunConfig, version: &str, out: &mut dyn Write) -> Result<()> {
        let header = cfg.header_lines(version);
        let config: Map<String, Value> = header[3..].iter().map(|(k, v)| (k.clone(), json!(v))).collect();
        let results: Map<String, Value> = self.results.iter().map(|(k, v)| (k.to_string(), v.json())).collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Object(self.columns.iter().zip(r).map(|(c, v)| (c.to_string(), v.json())).collect()))
            .collect();
        let doc = json!({
            "meta": {
                "tool": header[0].1,
                "command": header[1].1,
                "anchor": header[2].1,
                "config": config,
                "results": results,
            },
            "rows": rows,
        });
        serde_json::to_writer_pretty(&mut *out, &doc)?;
        writeln!(out)?;
        Ok(())
    }
}
