//! Deterministic table serialization: CSV with a `#` header block, or a
//! single JSON document. Identical configurations produce byte-identical
//! files (fixed float formatting, no timestamps).

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::config::{OutputFormat, RunConfig};
use crate::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }
}

fn fmt_value(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.12e}")
    } else {
        // NaN/inf are config errors upstream; keep the file parseable.
        format!("{v}")
    }
}

pub fn render_csv(config: &RunConfig, table: &Table) -> String {
    let mut out = String::new();
    out.push_str(&format!("# hyperbat {} {}\n", config.mode.name(), config.schema));
    out.push_str(&format!(
        "# config = {}\n",
        serde_json::to_string(config).expect("config serializes")
    ));
    out.push_str(&format!("# columns = {}\n", table.columns.join(",")));
    for row in &table.rows {
        let line: Vec<String> = row.iter().map(|&v| fmt_value(v)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct JsonDocument<'a> {
    schema: &'a str,
    mode: &'a str,
    config: &'a RunConfig,
    columns: &'a [String],
    rows: Vec<Vec<String>>,
}

pub fn render_json(config: &RunConfig, table: &Table) -> String {
    let doc = JsonDocument {
        schema: &config.schema,
        mode: config.mode.name(),
        config,
        columns: &table.columns,
        rows: table
            .rows
            .iter()
            .map(|r| r.iter().map(|&v| fmt_value(v)).collect())
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("document serializes");
    text.push('\n');
    text
}

pub fn render(config: &RunConfig, table: &Table) -> String {
    match config.format {
        OutputFormat::Csv => render_csv(config, table),
        OutputFormat::Json => render_json(config, table),
    }
}

/// Write to the configured path, or stdout when none is set.
pub fn emit(config: &RunConfig, table: &Table) -> Result<(), CliError> {
    let text = render(config, table);
    match &config.out {
        Some(path) => write_file(path, &text),
        None => {
            std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Numerical(format!("stdout write failed: {e}")))?;
            Ok(())
        }
    }
}

pub fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| CliError::Usage(format!("cannot create {}: {e}", parent.display())))?;
        }
    }
    std::fs::write(path, text)
        .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
}

/// Parse the data rows of a CSV produced by [`render_csv`]; used by the
/// integration tests to close the loop.
pub fn parse_csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| l.split(',').map(|v| v.parse::<f64>().unwrap()).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Mode;

    #[test]
    fn csv_is_deterministic_and_parseable() {
        let cfg = RunConfig::new(Mode::Trace);
        let mut t = Table::new(&["x", "y"]);
        t.push(vec![0.0, 1.0]);
        t.push(vec![0.5, -2.25e-8]);
        let a = render_csv(&cfg, &t);
        let b = render_csv(&cfg, &t);
        assert_eq!(a, b);
        let rows = parse_csv_rows(&a);
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[1][1], -2.25e-8);
        assert!(a.starts_with("# hyperbat trace hyperbat-v1\n"));
        assert!(a.contains("# columns = x,y\n"));
    }

    #[test]
    fn json_document_shape() {
        let cfg = RunConfig::new(Mode::Fig2b);
        let mut t = Table::new(&["a"]);
        t.push(vec![3.0]);
        let text = render_json(&cfg, &t);
        let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(doc["schema"], "hyperbat-v1");
        assert_eq!(doc["mode"], "fig2b");
        assert_eq!(doc["columns"][0], "a");
    }
}
