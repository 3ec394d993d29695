//! CSV tables with a JSON manifest next to each file.

use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Result, SimError};

/// Column-oriented table; header names carry units in brackets.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Table { name: name.to_string(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn push_f64(&mut self, row: &[f64]) {
        self.push(row.iter().map(|v| fmt(*v)).collect());
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.header.iter().position(|h| h == name || h.split(' ').next() == Some(name))?;
        Some(self.rows.iter().map(|r| r[i].parse().unwrap_or(f64::NAN)).collect())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).map_err(io_err)?;
        for r in &self.rows {
            w.write_record(r).map_err(io_err)?;
        }
        String::from_utf8(w.into_inner().map_err(|e| io_err(e.into_error()))?).map_err(|e| SimError::domain(e.to_string()))
    }
}

/// Shortest round-trip formatting, so reruns are byte identical.
pub fn fmt(v: f64) -> String {
    format!("{v:e}")
}

fn io_err<E: std::fmt::Display>(e: E) -> SimError {
    SimError::config(format!("output error: {e}"))
}

/// Writes `<name>.csv` and `<name>.json` for every table; returns the CSV paths.
pub fn write_tables(dir: &Path, tables: &[Table], manifest: &Value) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(io_err)?;
    let mut out = Vec::new();
    for t in tables {
        let csv_path = dir.join(format!("{}.csv", t.name));
        std::fs::write(&csv_path, t.to_csv()?).map_err(io_err)?;
        let mut m = manifest.clone();
        m["file"] = json!(format!("{}.csv", t.name));
        m["columns"] = json!(t.header);
        m["rows"] = json!(t.rows.len());
        m["version"] = json!(env!("CARGO_PKG_VERSION"));
        let text = serde_json::to_string_pretty(&m).map_err(io_err)? + "\n";
        std::fs::write(dir.join(format!("{}.json", t.name)), text).map_err(io_err)?;
        out.push(csv_path);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_and_manifest() {
        let mut t = Table::new("demo", &["t [s]", "p_g [1]"]);
        t.push_f64(&[1e-3, 0.25]);
        t.push_f64(&[2e-3, 0.5]);
        assert_eq!(t.to_csv().unwrap(), "t [s],p_g [1]\n1e-3,2.5e-1\n2e-3,5e-1\n");
        assert_eq!(t.column("p_g").unwrap(), vec![0.25, 0.5]);
        let dir = std::env::temp_dir().join(format!("simqg-out-{}", std::process::id()));
        let files = write_tables(&dir, &[t], &json!({"seed": 1})).unwrap();
        let m: Value = serde_json::from_str(&std::fs::read_to_string(dir.join("demo.json")).unwrap()).unwrap();
        assert_eq!(m["rows"], 2);
        assert_eq!(m["seed"], 1);
        assert!(files[0].exists());
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
