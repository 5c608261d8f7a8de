use clap::ValueEnum;
use heis_cauchy::verify::{Report, CSV_COLUMNS};
use heis_cauchy::QuadratureSpec;
use serde_json::{json, Map, Value};

use crate::Failure;

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Pretty,
}

/// Rows of stringified values with the quadrature settings that produced them.
pub struct Table {
    quadrature: Value,
    columns: Vec<String>,
    rows: Vec<Vec<String>>,
    notes: Vec<String>,
}

impl Table {
    pub fn new(spec: &QuadratureSpec) -> Self {
        Table {
            quadrature: serde_json::to_value(spec).unwrap_or(Value::Null),
            columns: Vec::new(),
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn columns(&mut self, cols: &[&str]) {
        self.columns = cols.iter().map(|c| c.to_string()).collect();
    }

    pub fn row(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn report(&mut self, report: Report) {
        self.columns(&CSV_COLUMNS);
        for r in report.rows {
            self.rows.push(vec![
                r.case_id,
                num(r.computed),
                num(r.expected),
                num(r.rel_err),
                num(r.tol),
                r.pass.to_string(),
                r.evaluations.to_string(),
                num(r.seconds),
            ]);
        }
        self.notes = report.notes;
    }

    pub fn render(&self, format: Format) -> Result<String, Failure> {
        match format {
            Format::Csv => self.csv(),
            Format::Json => Ok(self.json()),
            Format::Pretty => Ok(self.pretty()),
        }
    }

    fn csv(&self) -> Result<String, Failure> {
        let mut out = format!("# quadrature {}\n", self.quadrature);
        for n in &self.notes {
            out.push_str(&format!("# {n}\n"));
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        let err = |e: csv::Error| Failure::Runtime(e.to_string());
        w.write_record(&self.columns).map_err(err)?;
        for r in &self.rows {
            w.write_record(r).map_err(err)?;
        }
        let bytes = w.into_inner().map_err(|e| Failure::Runtime(e.to_string()))?;
        out.push_str(&String::from_utf8_lossy(&bytes));
        Ok(out)
    }

    fn json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(r)
                    .map(|(c, v)| (c.clone(), cell(v)))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let doc = json!({
            "quadrature": self.quadrature,
            "notes": self.notes,
            "rows": rows,
        });
        let mut s = serde_json::to_string_pretty(&doc).unwrap_or_default();
        s.push('\n');
        s
    }

    fn pretty(&self) -> String {
        let mut widths: Vec<usize> = self.columns.iter().map(String::len).collect();
        for r in &self.rows {
            for (w, v) in widths.iter_mut().zip(r) {
                *w = (*w).max(v.len());
            }
        }
        let line = |cells: &[String]| {
            let parts: Vec<String> = cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect();
            parts.join("  ").trim_end().to_string() + "\n"
        };
        let mut out = line(&self.columns);
        let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
        out.push_str(&line(&rule));
        for r in &self.rows {
            out.push_str(&line(r));
        }
        for n in &self.notes {
            out.push_str(&format!("note: {n}\n"));
        }
        out
    }
}

// Numbers and booleans stay typed in JSON output.
fn cell(v: &str) -> Value {
    if let Ok(b) = v.parse::<bool>() {
        return Value::Bool(b);
    }
    if let Ok(i) = v.parse::<u64>() {
        return Value::from(i);
    }
    match v.parse::<f64>() {
        Ok(x) if x.is_finite() => Value::from(x),
        _ => Value::String(v.to_string()),
    }
}

/// Shortest round-trip text, in exponent form for very small or large values.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e16).contains(&a) {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}
