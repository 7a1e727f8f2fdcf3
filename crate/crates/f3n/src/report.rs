//! Report envelopes and the json/text/csv renderers.

use clap::ValueEnum;
use num_bigint::{BigInt, BigUint};
use num_rational::{BigRational, Ratio};
use serde_json::{json, Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
    Csv,
}

/// Rows for CSV export of a report's main histogram or listing.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub body: Map<String, Value>,
    pub table: Option<Table>,
    /// Set when an exact identity failed; the report is still emitted.
    pub violation: Option<String>,
}

impl Report {
    pub fn new(body: Value) -> Self {
        let Value::Object(body) = body else {
            panic!("report body must be an object")
        };
        Self {
            body,
            table: None,
            violation: None,
        }
    }

    pub fn with_table(mut self, table: Table) -> Self {
        self.table = Some(table);
        self
    }

    pub fn check(mut self, ok: bool, what: impl FnOnce() -> String) -> Self {
        if !ok && self.violation.is_none() {
            self.violation = Some(what());
        }
        self
    }
}

pub struct Meta<'a> {
    pub command: &'a [String],
    pub seed: u64,
}

impl Meta<'_> {
    fn to_value(&self) -> Value {
        let mut words = vec!["f3n".to_string()];
        words.extend(self.command.iter().skip(1).cloned());
        json!({
            "tool": "f3n",
            "version": env!("CARGO_PKG_VERSION"),
            "command": words.join(" "),
            "seed": self.seed,
        })
    }
}

pub fn render(report: &Report, meta: &Meta<'_>, format: Format) -> String {
    match format {
        Format::Json => {
            let mut top = Map::new();
            top.insert("meta".into(), meta.to_value());
            top.extend(report.body.clone());
            let mut s = serde_json::to_string_pretty(&Value::Object(top)).expect("serializable");
            s.push('\n');
            s
        }
        Format::Text => {
            let mut s = String::new();
            for (k, v) in meta
                .to_value()
                .as_object()
                .expect("object")
                .iter()
                .chain(report.body.iter())
            {
                s.push_str(k);
                s.push_str(": ");
                s.push_str(&scalar(v));
                s.push('\n');
            }
            s
        }
        Format::Csv => {
            let table = report.table.clone().unwrap_or_else(|| {
                let fields: Vec<_> = report
                    .body
                    .iter()
                    .filter(|(_, v)| !v.is_array() && !v.is_object())
                    .collect();
                let mut t = Table {
                    header: fields.iter().map(|(k, _)| k.to_string()).collect(),
                    rows: Vec::new(),
                };
                t.push(fields.iter().map(|(_, v)| scalar(v)).collect());
                t
            });
            let mut s = csv_line(&table.header);
            for row in &table.rows {
                s.push_str(&csv_line(row));
            }
            s
        }
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn csv_line(fields: &[String]) -> String {
    let quoted: Vec<String> = fields
        .iter()
        .map(|f| {
            if f.contains([',', '"', '\n']) {
                format!("\"{}\"", f.replace('"', "\"\""))
            } else {
                f.clone()
            }
        })
        .collect();
    quoted.join(",") + "\n"
}

pub fn big(x: &BigUint) -> Value {
    Value::String(x.to_string())
}

pub fn bigint(x: &BigInt) -> Value {
    Value::String(x.to_string())
}

/// Rationals are always written `p/q`, integers included.
pub fn rat(x: &BigRational) -> Value {
    Value::String(rat_str(x))
}

pub fn rat_str(x: &BigRational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub fn ratio_u64(x: &Ratio<u64>) -> Value {
    Value::String(format!("{}/{}", x.numer(), x.denom()))
}

/// Floats that may be non-finite become `null`.
pub fn float(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}
