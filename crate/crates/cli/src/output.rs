use std::fmt::Write as _;
use std::io::{self, Write};

use clap::ValueEnum;
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// A command result: a JSON document, plus an optional table that CSV output
/// prefers over flattening the document.
pub struct Report {
    pub doc: Value,
    pub table: Option<Table>,
    /// Lines appended after CSV tables, prefixed with `# `.
    pub notes: Vec<String>,
}

pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Report {
    pub fn new(doc: Value) -> Self {
        Self {
            doc,
            table: None,
            notes: Vec::new(),
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.doc).expect("values serialize");
                s.push('\n');
                s
            }
            Format::Csv => {
                let mut s = match &self.table {
                    Some(t) => render_table(t),
                    None => {
                        let mut cols = Vec::new();
                        flatten("", &self.doc, &mut cols);
                        let (header, row): (Vec<String>, Vec<Value>) = cols.into_iter().unzip();
                        render_table(&Table {
                            header,
                            rows: vec![row],
                        })
                    }
                };
                for n in &self.notes {
                    let _ = writeln!(s, "# {n}");
                }
                s
            }
        }
    }

    pub fn print(&self, format: Format) -> io::Result<()> {
        let mut out = io::stdout().lock();
        out.write_all(self.render(format).as_bytes())?;
        out.flush()
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) if s.contains([',', '"', '\n']) => {
            format!("\"{}\"", s.replace('"', "\"\""))
        }
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn render_table(t: &Table) -> String {
    let mut s = t.header.join(",");
    s.push('\n');
    for row in &t.rows {
        s.push_str(&row.iter().map(cell).collect::<Vec<_>>().join(","));
        s.push('\n');
    }
    s
}

/// Flattens nested objects with dotted keys and numeric arrays into
/// 1-based indexed columns.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, Value)>) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                flatten(&key(k), x, out);
            }
        }
        Value::Array(xs) => {
            for (i, x) in xs.iter().enumerate() {
                flatten(&format!("{prefix}{}", i + 1), x, out);
            }
        }
        other => out.push((prefix.to_string(), other.clone())),
    }
}

/// Builds a JSON object from key/value pairs in order.
pub fn object<const N: usize>(pairs: [(&str, Value); N]) -> Value {
    let mut m = Map::new();
    for (k, v) in pairs {
        m.insert(k.to_string(), v);
    }
    Value::Object(m)
}
