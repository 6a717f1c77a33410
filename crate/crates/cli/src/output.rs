//! Tables written as CSV or as self-describing JSON.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::config::Format;
use crate::error::CliError;

/// One table entry.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(v) => format_number(*v),
            Cell::Text(t) => t.clone(),
        }
    }
}

/// Rows under fixed column names.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        self.push_cells(row.into_iter().map(Cell::Num).collect());
    }

    pub fn push_cells(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), CliError> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.columns)?;
        for row in &self.rows {
            out.write_record(row.iter().map(Cell::render))?;
        }
        out.flush().map_err(|e| CliError::Output(e.to_string()))?;
        Ok(())
    }
}

/// Shortest representation that round-trips; integers print without a fraction.
pub fn format_number(v: f64) -> String {
    if v.is_finite() && v == v.trunc() && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v:?}")
    }
}

#[derive(Serialize)]
struct Document<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    config: &'a Value,
    #[serde(flatten)]
    table: &'a Table,
    #[serde(skip_serializing_if = "Option::is_none")]
    extra: Option<&'a Value>,
}

/// Everything one command produces.
pub struct Report {
    pub command: String,
    pub config: Value,
    pub table: Table,
    pub extra: Option<Value>,
}

impl Report {
    pub fn render(&self, format: Format) -> Result<Vec<u8>, CliError> {
        let mut buf = Vec::new();
        match format {
            Format::Csv => self.table.write_csv(&mut buf)?,
            Format::Json => {
                let doc = Document {
                    tool: "satcov",
                    version: env!("CARGO_PKG_VERSION"),
                    command: &self.command,
                    config: &self.config,
                    table: &self.table,
                    extra: self.extra.as_ref(),
                };
                serde_json::to_writer_pretty(&mut buf, &doc)?;
                buf.push(b'\n');
            }
        }
        Ok(buf)
    }

    /// Writes to `path`, or to standard output when absent.
    pub fn emit(&self, format: Format, path: Option<&Path>) -> Result<(), CliError> {
        let bytes = self.render(format)?;
        match path {
            Some(p) => std::fs::write(p, bytes).map_err(|e| CliError::Output(format!("{}: {e}", p.display()))),
            None => std::io::stdout().write_all(&bytes).map_err(|e| CliError::Output(e.to_string())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers() {
        assert_eq!(format_number(3.0), "3");
        assert_eq!(format_number(-10.0), "-10");
        assert_eq!(format_number(0.1), "0.1");
        assert_eq!(format_number(1e-20), "1e-20");
        assert_eq!(format_number(f64::NAN), "NaN");
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(&["gamma_db", "value"]);
        t.push(vec![-10.0, 0.5]);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "gamma_db,value\n-10,0.5\n");
    }
}
