use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::Result;
use crate::halfspace::write_atomic;

/// `<version>+<git revision>` of this build.
pub fn build_id() -> String {
    format!("{}+{}", env!("CARGO_PKG_VERSION"), env!("FRAC_YAMABE_GIT_REV"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Round to 12 significant digits.
pub fn sig12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

/// JSON number rounded to 12 significant digits; `null` if not finite.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(sig12(x)).map_or(Value::Null, Value::Number)
}

pub type Row = Map<String, Value>;

/// Tabular result of one command, plus free-form extras for JSON output.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: String,
    pub seed: u64,
    pub rows: Vec<Row>,
    pub summary: Row,
    /// Bulky payloads (field dumps) kept out of the table.
    pub extras: Row,
}

impl Report {
    pub fn new(command: &str, seed: u64) -> Self {
        Self {
            command: command.to_string(),
            seed,
            rows: Vec::new(),
            summary: Row::new(),
            extras: Row::new(),
        }
    }

    pub fn to_json(&self) -> Value {
        let mut m = Row::new();
        m.insert("command".into(), Value::from(self.command.clone()));
        m.insert("build_id".into(), Value::from(build_id()));
        m.insert("seed".into(), Value::from(self.seed));
        m.insert("rows".into(), Value::Array(self.rows.iter().cloned().map(Value::Object).collect()));
        m.insert("summary".into(), Value::Object(self.summary.clone()));
        for (k, v) in &self.extras {
            m.insert(k.clone(), v.clone());
        }
        Value::Object(m)
    }

    /// Header from the union of row keys in first-seen order.
    pub fn to_csv(&self) -> String {
        let mut cols: Vec<&String> = Vec::new();
        for r in &self.rows {
            for k in r.keys() {
                if !cols.contains(&k) {
                    cols.push(k);
                }
            }
        }
        let mut out = cols.iter().map(|c| c.as_str()).collect::<Vec<_>>().join(",");
        out.push('\n');
        for r in &self.rows {
            let line: Vec<String> = cols.iter().map(|c| r.get(*c).map_or(String::new(), cell)).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json()).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Csv => self.to_csv(),
        }
    }

    /// Atomic write to `path`, or stdout when `None`.
    pub fn emit(&self, format: Format, path: Option<&Path>) -> Result<()> {
        let text = self.render(format);
        match path {
            Some(p) => write_atomic(p, text.as_bytes()),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) if s.contains(',') || s.contains('"') => format!("\"{}\"", s.replace('"', "\"\"")),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
