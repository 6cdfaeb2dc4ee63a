use std::fs::OpenOptions;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde_json::Value;

use crate::CliError;

pub const OUTPUT_DIR_ENV: &str = "SELFREP_OUTPUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Jsonl,
    Csv,
    Text,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Jsonl => "jsonl",
            Format::Csv => "csv",
            Format::Text => "txt",
        }
    }
}

/// One command result in every output format.
pub struct Report {
    pub json: Value,
    /// Records for `jsonl` and `csv`; defaults to `[json]`.
    pub rows: Vec<Value>,
    pub text: String,
}

impl Report {
    pub fn new(json: Value, text: String) -> Self {
        Self {
            rows: vec![json.clone()],
            json,
            text,
        }
    }

    pub fn with_rows(mut self, rows: Vec<Value>) -> Self {
        self.rows = rows;
        self
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => format!(
                "{}\n",
                serde_json::to_string_pretty(&self.json).expect("json")
            ),
            Format::Jsonl => self
                .rows
                .iter()
                .map(|r| format!("{}\n", serde_json::to_string(r).expect("json")))
                .collect(),
            Format::Csv => to_csv(&self.rows),
            Format::Text => {
                let mut t = self.text.clone();
                if !t.ends_with('\n') {
                    t.push('\n');
                }
                t
            }
        }
    }
}

fn csv_cell(v: &Value) -> String {
    let s = match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    };
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s
    }
}

pub fn to_csv(rows: &[Value]) -> String {
    let mut keys: Vec<String> = Vec::new();
    for r in rows {
        if let Value::Object(m) = r {
            for k in m.keys() {
                if !keys.contains(k) {
                    keys.push(k.clone());
                }
            }
        }
    }
    let mut out = keys.join(",");
    out.push('\n');
    for r in rows {
        let line: Vec<String> = keys
            .iter()
            .map(|k| csv_cell(r.get(k).unwrap_or(&Value::Null)))
            .collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

/// Resolves `--output` against the output-directory variable. With no
/// `--output` and the variable set, writes `<dir>/<command>.<ext>`.
pub fn resolve_path(output: Option<&Path>, command: &str, format: Format) -> Option<PathBuf> {
    let dir = std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from);
    match (output, dir) {
        (Some(p), Some(d)) if p.is_relative() => Some(d.join(p)),
        (Some(p), _) => Some(p.to_path_buf()),
        (None, Some(d)) => Some(d.join(format!("{command}.{}", format.extension()))),
        (None, None) => None,
    }
}

pub fn open(path: Option<&Path>, append: bool) -> Result<Box<dyn Write>, CliError> {
    match path {
        None => Ok(Box::new(io::stdout().lock())),
        Some(p) => {
            if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent)
                    .map_err(|e| CliError::Internal(format!("{}: {e}", parent.display())))?;
            }
            let f = OpenOptions::new()
                .create(true)
                .write(true)
                .append(append)
                .truncate(!append)
                .open(p)
                .map_err(|e| CliError::Internal(format!("{}: {e}", p.display())))?;
            Ok(Box::new(io::BufWriter::new(f)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn csv_union_of_keys() {
        let rows = vec![json!({"a": 1, "b": "x,y"}), json!({"a": 2, "c": true})];
        assert_eq!(to_csv(&rows), "a,b,c\n1,\"x,y\",\n2,,true\n");
    }

    #[test]
    fn jsonl_one_line_per_row() {
        let r = Report::new(json!({"k": 1}), "k = 1".into())
            .with_rows(vec![json!({"n": 0}), json!({"n": 1})]);
        assert_eq!(r.render(Format::Jsonl), "{\"n\":0}\n{\"n\":1}\n");
        assert_eq!(r.render(Format::Text), "k = 1\n");
    }
}
