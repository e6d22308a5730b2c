//! CSV/JSON emission with a reproducible metadata block.
//!
//! CSV files open with `# key = value` comment lines, then a header row and
//! data rows with 17 significant digits so every double round-trips exactly.
//! JSON output is one object {"metadata": {...}, "rows": [...]} with native
//! numbers (serde_json prints the shortest exact representation).

use std::fmt::Write as _;
use std::io::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

pub struct Table {
    pub metadata: Vec<(String, serde_json::Value)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<serde_json::Value>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self {
            metadata: Vec::new(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn meta<V: Into<serde_json::Value>>(&mut self, key: &str, value: V) {
        self.metadata.push((key.to_string(), value.into()));
    }

    pub fn meta_f(&mut self, key: &str, value: f64) {
        self.metadata.push((key.to_string(), num(value)));
    }

    pub fn push_row(&mut self, row: Vec<serde_json::Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.render_csv(),
            Format::Json => self.render_json(),
        }
    }

    fn render_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.metadata {
            let _ = writeln!(out, "# {k} = {}", csv_cell(v));
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(csv_cell).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    fn render_json(&self) -> String {
        let metadata: serde_json::Map<String, serde_json::Value> = self
            .metadata
            .iter()
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: serde_json::Map<String, serde_json::Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| (c.to_string(), v.clone()))
                    .collect();
                serde_json::Value::Object(obj)
            })
            .collect();
        let doc = serde_json::json!({ "metadata": metadata, "rows": rows });
        let mut text = serde_json::to_string_pretty(&doc).expect("serializable");
        text.push('\n');
        text
    }
}

/// Wrap an f64 as a JSON value; non-finite values become strings so the
/// document stays valid.
pub fn num(x: f64) -> serde_json::Value {
    match serde_json::Number::from_f64(x) {
        Some(n) => serde_json::Value::Number(n),
        None => serde_json::Value::String(format!("{x}")),
    }
}

fn csv_cell(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::String(s) => s.clone(),
        serde_json::Value::Number(n) => match n.as_f64() {
            // 17 significant digits: lossless round-trip of every double.
            Some(x) if n.is_f64() => format!("{x:.16e}"),
            _ => n.to_string(),
        },
        other => other.to_string(),
    }
}

pub fn emit(table: &Table, format: Format, output: Option<&str>) -> std::io::Result<()> {
    let text = table.render(format);
    match output {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    }
}
