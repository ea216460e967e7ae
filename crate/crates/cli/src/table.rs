//! Result tables and their CSV form: provenance comment lines, a header
//! row, a units row, then data rows. Comma separated, '.' decimal,
//! LF line endings. Float formatting is shortest-round-trip, so a fixed
//! config always produces identical bytes.

use std::io::Write;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::CliError;

pub struct ResultTable {
    pub columns: Vec<&'static str>,
    pub units: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub provenance: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

pub fn fmt_float(v: f64) -> String {
    format!("{v:?}")
}

impl ResultTable {
    pub fn new(columns: Vec<&'static str>, units: Vec<&'static str>) -> Self {
        assert_eq!(columns.len(), units.len());
        Self {
            columns,
            units,
            rows: Vec::new(),
            provenance: Vec::new(),
        }
    }

    pub fn with_provenance(mut self, config_bytes: &[u8]) -> Self {
        let digest = Sha256::digest(config_bytes);
        self.provenance = vec![
            format!(
                "# generator = spinrelax {}",
                env!("CARGO_PKG_VERSION")
            ),
            format!("# config_sha256 = {digest:x}"),
        ];
        self
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "ragged row");
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for line in &self.provenance {
            out.push_str(line);
            out.push('\n');
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        out.push_str(&self.units.join(","));
        out.push('\n');
        for row in &self.rows {
            let mut first = true;
            for cell in row {
                if !first {
                    out.push(',');
                }
                first = false;
                match cell {
                    Cell::Float(v) => out.push_str(&fmt_float(*v)),
                    Cell::Text(s) => out.push_str(s),
                    Cell::Empty => {}
                }
            }
            out.push('\n');
        }
        out
    }

    /// Write CSV to the path, or to stdout when no path is given.
    pub fn emit(&self, path: Option<&Path>) -> Result<(), CliError> {
        let csv = self.to_csv();
        match path {
            Some(p) => std::fs::write(p, csv).map_err(|e| {
                CliError::Numerical(format!("cannot write {}: {e}", p.display()))
            }),
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout
                    .write_all(csv.as_bytes())
                    .map_err(|e| CliError::Numerical(format!("stdout: {e}")))
            }
        }
    }
}
