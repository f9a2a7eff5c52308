use std::io::Write;

use qtwist::linalg::Residual;
use qtwist::repcore::RelationReport;
use serde::Serialize;
use serde_json::Value;

use crate::config::Format;

#[derive(Debug, Serialize)]
pub struct Row {
    pub name: String,
    pub value: Value,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: &'static str,
    pub q: String,
    pub tol: f64,
    pub pass: bool,
    pub rows: Vec<Row>,
}

impl Report {
    pub fn new(command: &'static str, q: String, tol: f64) -> Self {
        Report {
            command,
            q,
            tol,
            pass: true,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, name: impl Into<String>, value: Value, pass: bool) {
        self.pass &= pass;
        self.rows.push(Row {
            name: name.into(),
            value,
            pass,
        });
    }

    pub fn push_residual(&mut self, name: impl Into<String>, r: &Residual) {
        let value = match r {
            Residual::Exact(x) => Value::String(x.pretty()),
            Residual::Approx(x) => serde_json::json!(x),
        };
        let pass = r.passes(self.tol);
        self.push(name, value, pass);
    }

    pub fn push_f64(&mut self, name: impl Into<String>, x: f64) {
        let pass = x <= self.tol;
        self.push(name, serde_json::json!(x), pass);
    }

    pub fn push_relations(&mut self, prefix: &str, rep: &RelationReport) {
        for e in &rep.entries {
            let idx = match (e.i, e.j) {
                (Some(i), Some(j)) => format!("[{i},{j}]"),
                (Some(i), None) => format!("[{i}]"),
                _ => String::new(),
            };
            self.push_residual(format!("{prefix}{}{idx}", e.relation), &e.residual);
        }
    }

    pub fn write(&self, format: Format, out: &mut impl Write) -> std::io::Result<()> {
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut *out, self)?;
                writeln!(out)
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(["name", "value", "pass"])?;
                for r in &self.rows {
                    let value = match &r.value {
                        Value::String(s) => s.clone(),
                        other => other.to_string(),
                    };
                    w.write_record([r.name.as_str(), value.as_str(), if r.pass { "pass" } else { "FAIL" }])?;
                }
                w.flush()
            }
        }
    }
}
