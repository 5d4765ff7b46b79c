//! CSV reports: a comment line with the schema version, a header row and
//! rows of numbers printed with 17 significant digits.

use std::io::Write;
use std::path::Path;

use crate::CliError;

/// Bumped whenever a header changes.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Text(String),
    Flag(bool),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Real(v) => format!("{v:.16e}"),
            Cell::Text(s) => s.clone(),
            Cell::Flag(b) => b.to_string(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Cell::Int(v) => Some(v as f64),
            Cell::Real(v) => Some(v),
            _ => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Flag(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsvReport {
    pub experiment: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl CsvReport {
    pub fn new(experiment: &str, header: &[&'static str]) -> Self {
        CsvReport {
            experiment: experiment.to_string(),
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.header.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| *h == name)
    }

    /// Numeric values of a column; `None` for an unknown name. Text cells
    /// read as NaN.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column_index(name)?;
        Some(
            self.rows
                .iter()
                .map(|r| r[i].as_f64().unwrap_or(f64::NAN))
                .collect(),
        )
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "# glnres schema {SCHEMA_VERSION} experiment {}\n",
            self.experiment
        );
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::render).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// Write to `path`, or to standard output when `path` is `None`.
    pub fn write(&self, path: Option<&Path>) -> Result<(), CliError> {
        let text = self.to_csv();
        match path {
            Some(p) => std::fs::write(p, text)?,
            None => std::io::stdout().lock().write_all(text.as_bytes())?,
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_keep_seventeen_digits() {
        let mut r = CsvReport::new("demo", &["n", "x", "ok"]);
        r.push(vec![2u32.into(), 0.1f64.into(), true.into()]);
        r.push(vec![3u32.into(), (-1.0f64 / 3.0).into(), false.into()]);
        let text = r.to_csv();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# glnres schema 1 experiment demo");
        assert_eq!(lines[1], "n,x,ok");
        assert_eq!(lines[2], "2,1.0000000000000001e-1,true");
        let back: f64 = lines[3].split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(back, -1.0 / 3.0);
    }

    #[test]
    fn columns_by_name() {
        let mut r = CsvReport::new("demo", &["a", "b"]);
        r.push(vec![1i64.into(), "x".into()]);
        assert_eq!(r.column("a"), Some(vec![1.0]));
        assert!(r.column("b").unwrap()[0].is_nan());
        assert_eq!(r.column("c"), None);
    }
}
