//! Record sets rendered as an aligned table, CSV or JSON.

use std::io::Write;
use std::path::Path;

use anyhow::Context;
use clap::ValueEnum;
use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Table,
    Csv,
    Json,
}

/// Ordered columns and rows of JSON values, plus the configuration that
/// produced them.
pub struct Records {
    pub command: &'static str,
    pub config: Value,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

impl Records {
    pub fn new(command: &'static str, config: Value, columns: Vec<&'static str>) -> Self {
        Records { command, config, columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let records: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let obj: Map<String, Value> =
                            self.columns.iter().map(|c| c.to_string()).zip(row.iter().cloned()).collect();
                        Value::Object(obj)
                    })
                    .collect();
                let doc = serde_json::json!({ "command": self.command, "config": self.config, "records": records });
                let mut s = serde_json::to_string_pretty(&doc).expect("records serialize");
                s.push('\n');
                s
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(format!("# {} {}\n", self.command, self.config).into_bytes());
                w.write_record(&self.columns).expect("writing to memory");
                for row in &self.rows {
                    w.write_record(row.iter().map(plain)).expect("writing to memory");
                }
                String::from_utf8(w.into_inner().expect("flushing to memory")).expect("records are UTF-8")
            }
            Format::Table => {
                let cells: Vec<Vec<String>> = self.rows.iter().map(|r| r.iter().map(plain).collect()).collect();
                let widths: Vec<usize> = (0..self.columns.len())
                    .map(|k| cells.iter().map(|r| r[k].len()).chain([self.columns[k].len()]).max().unwrap_or(0))
                    .collect();
                let line = |items: Vec<&str>| {
                    let padded: Vec<String> = items.iter().zip(&widths).map(|(s, w)| format!("{s:<w$}")).collect();
                    padded.join("  ").trim_end().to_string() + "\n"
                };
                let mut s = format!("# {} {}\n", self.command, self.config);
                s.push_str(&line(self.columns.clone()));
                for row in &cells {
                    s.push_str(&line(row.iter().map(String::as_str).collect()));
                }
                s
            }
        }
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

pub fn emit(text: &str, out: Option<&Path>) -> anyhow::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).context("writing to standard output")
        }
    }
}
