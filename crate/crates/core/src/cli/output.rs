use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Serialize;

use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Cell {
    Real(f64),
    Int(i64),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Real(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        Cell::Real(x.unwrap_or(f64::NAN))
    }
}

/// Reals are written with 12 significant digits.
pub fn format_real(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.11e}")
    }
}

impl Cell {
    fn csv(&self) -> String {
        match *self {
            Cell::Real(x) => format_real(x),
            Cell::Int(i) => i.to_string(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match *self {
            Cell::Real(x) if x.is_finite() => format_real(x).parse::<f64>().map_or(serde_json::Value::Null, |v| v.into()),
            Cell::Real(_) => serde_json::Value::Null,
            Cell::Int(i) => i.into(),
        }
    }
}

/// Column-named table of numbers.
#[derive(Clone, Debug)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            let _ = writeln!(s, "{}", cells.join(","));
        }
        s
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "columns": self.columns,
            "rows": self.rows.iter().map(|r| r.iter().map(Cell::json).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }
}

/// Output directory that records every file written into it.
pub struct OutputDir {
    root: PathBuf,
    format: Format,
    files: Vec<String>,
}

impl OutputDir {
    pub fn create(root: &Path, format: Format) -> Result<Self> {
        std::fs::create_dir_all(root)?;
        Ok(OutputDir {
            root: root.to_path_buf(),
            format,
            files: Vec::new(),
        })
    }

    pub fn path(&self) -> &Path {
        &self.root
    }

    pub fn files(&self) -> &[String] {
        &self.files
    }

    fn write(&mut self, name: String, contents: &str) -> Result<()> {
        std::fs::write(self.root.join(&name), contents)?;
        self.files.push(name);
        Ok(())
    }

    /// Writes `stem.csv` or `stem.json` depending on the chosen format.
    pub fn table(&mut self, stem: &str, table: &Table) -> Result<()> {
        match self.format {
            Format::Csv => self.write(format!("{stem}.csv"), &table.to_csv()),
            Format::Json => {
                let text = serde_json::to_string_pretty(&table.to_json())?;
                self.write(format!("{stem}.json"), &(text + "\n"))
            }
        }
    }

    /// Always JSON.
    pub fn json<T: Serialize>(&mut self, stem: &str, value: &T) -> Result<()> {
        let text = serde_json::to_string_pretty(value)?;
        self.write(format!("{stem}.json"), &(text + "\n"))
    }

    pub fn text(&mut self, name: &str, contents: &str) -> Result<()> {
        self.write(name.to_string(), contents)
    }
}
