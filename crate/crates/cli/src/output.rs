//! Tabular output: CSV with `#` header lines, and a JSON object
//! `{params, axes, columns, data}`.

use std::fmt::Write as _;

use serde_json::{json, Map, Value};

/// A long-format table plus its parameter echo.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    pub params: Vec<(String, String)>,
    /// Grid axes in sweep order; informational for JSON consumers.
    pub axes: Vec<(String, Vec<f64>)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Dataset {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn param(&self, key: &str) -> Option<&str> {
        self.params.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn to_csv(d: &Dataset) -> String {
    let mut out = String::new();
    for (k, v) in &d.params {
        let _ = writeln!(out, "# {k}={}", v.replace('\n', " "));
    }
    out.push_str(&d.columns.join(","));
    out.push('\n');
    for row in &d.rows {
        let cells: Vec<String> = row.iter().map(|&v| format_value(v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

#[derive(Debug, PartialEq)]
pub struct CsvError(pub String);

impl std::fmt::Display for CsvError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for CsvError {}

/// Parses output of [`to_csv`]. Axis metadata is not stored in CSV.
pub fn parse_csv(text: &str) -> Result<Dataset, CsvError> {
    let mut d = Dataset::default();
    let mut lines = text.lines().enumerate();
    for (n, line) in lines.by_ref() {
        if let Some(rest) = line.strip_prefix("# ") {
            let (k, v) = rest
                .split_once('=')
                .ok_or_else(|| CsvError(format!("line {}: header without '='", n + 1)))?;
            d.params.push((k.to_string(), v.to_string()));
        } else {
            d.columns = line.split(',').map(str::to_string).collect();
            break;
        }
    }
    for (n, line) in lines {
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|c| c.parse::<f64>().map_err(|e| CsvError(format!("line {}: {e}", n + 1))))
            .collect::<Result<Vec<_>, _>>()?;
        if row.len() != d.columns.len() {
            return Err(CsvError(format!(
                "line {}: {} cells, expected {}",
                n + 1,
                row.len(),
                d.columns.len()
            )));
        }
        d.rows.push(row);
    }
    Ok(d)
}

pub fn to_json(d: &Dataset) -> Value {
    let params: Map<String, Value> = d
        .params
        .iter()
        .map(|(k, v)| (k.clone(), Value::String(v.clone())))
        .collect();
    let axes: Map<String, Value> = d.axes.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
    json!({
        "params": params,
        "axes": axes,
        "columns": d.columns,
        "data": d.rows,
    })
}

/// Key/value report rendered as text, CSV or JSON.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub entries: Vec<(String, Value)>,
}

impl Report {
    pub fn push(&mut self, key: &str, value: impl Into<Value>) {
        self.entries.push((key.to_string(), value.into()));
    }

    pub fn to_text(&self) -> String {
        let width = self.entries.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        let mut out = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(out, "{k:<width$}  {}", display(v));
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("quantity,value\n");
        for (k, v) in &self.entries {
            let _ = writeln!(out, "{k},{}", display(v));
        }
        out
    }

    pub fn to_json(&self) -> Value {
        Value::Object(self.entries.iter().cloned().collect())
    }
}

fn display(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => match n.as_f64() {
            Some(f) if n.is_f64() => format_value(f),
            _ => n.to_string(),
        },
        other => other.to_string(),
    }
}
