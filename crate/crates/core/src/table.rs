//! Whitespace-separated tabular data files (column 0 is the index or
//! x-value, subsequent columns are series) with JSON metadata sidecars
//! carrying everything needed to regenerate them.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct DataTable {
    columns: Vec<(String, Vec<f64>)>,
}

impl DataTable {
    pub fn new() -> Self {
        Self {
            columns: Vec::new(),
        }
    }

    pub fn push_column(&mut self, name: impl Into<String>, values: Vec<f64>) -> Result<()> {
        if let Some((_, first)) = self.columns.first() {
            if first.len() != values.len() {
                return Err(Error::DimensionMismatch(format!(
                    "column length {} does not match table height {}",
                    values.len(),
                    first.len()
                )));
            }
        }
        self.columns.push((name.into(), values));
        Ok(())
    }

    pub fn column_names(&self) -> Vec<String> {
        self.columns.iter().map(|(n, _)| n.clone()).collect()
    }

    pub fn n_rows(&self) -> usize {
        self.columns.first().map_or(0, |(_, v)| v.len())
    }

    /// Rows of space-separated values; floats print in shortest
    /// round-trip form so repeated runs are byte-identical.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        for row in 0..self.n_rows() {
            let mut first = true;
            for (_, col) in &self.columns {
                if !first {
                    write!(w, " ")?;
                }
                write!(w, "{}", col[row])?;
                first = false;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn write_file<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        self.write_to(&mut f)
    }
}

impl Default for DataTable {
    fn default() -> Self {
        Self::new()
    }
}

/// JSON sidecar written next to each data file. Contains the merged
/// effective configuration so a run is reproducible from the sidecar alone.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Sidecar {
    pub command: String,
    pub params: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_samples: Option<u64>,
    pub columns: Vec<String>,
    /// Standard errors keyed by column name, where applicable.
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub standard_errors: BTreeMap<String, Vec<f64>>,
}

impl Sidecar {
    pub fn new(command: impl Into<String>, params: serde_json::Value) -> Self {
        Self {
            command: command.into(),
            params,
            seed: None,
            n_samples: None,
            columns: Vec::new(),
            standard_errors: BTreeMap::new(),
        }
    }

    pub fn write_file<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        serde_json::to_writer_pretty(&mut f, self)?;
        writeln!(f)?;
        Ok(())
    }
}
