//! JSON and CSV rendering. JSON floats use the shortest form that reads back to the
//! same double (at most 17 significant digits); CSV floats carry 9.

use serde::Serialize;
use serde_json::Value;

use crate::args::Format;
use crate::config::Params;
use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Output {
    pub config: Params,
    pub version: String,
    pub rows: Vec<Params>,
}

pub fn version() -> String {
    format!("dipolatt {}", env!("CARGO_PKG_VERSION"))
}

/// Reject rows holding non-finite numbers (serialized as null).
pub fn check_finite(rows: &[Params]) -> Result<()> {
    for (i, row) in rows.iter().enumerate() {
        for (k, v) in row {
            if v.is_null() {
                return Err(CliError::Numerical(format!("row {i}: `{k}` is not finite")));
            }
        }
    }
    Ok(())
}

fn csv_field(v: &Value) -> String {
    match v {
        Value::Number(n) => match n.as_f64() {
            Some(x) if n.is_f64() => format!("{x:.8e}"),
            _ => n.to_string(),
        },
        Value::String(s) => s.clone(),
        Value::Bool(b) => b.to_string(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

/// Two `#` lines carry the version and config echo, then the header row.
pub fn to_csv(out: &Output) -> Result<String> {
    let mut text = format!("# version: {}\n# config: {}\n", out.version, Value::Object(out.config.clone()));
    let Some(first) = out.rows.first() else {
        return Ok(text);
    };
    let header: Vec<&String> = first.keys().collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(header.iter().map(|s| s.as_str())).map_err(io)?;
    for row in &out.rows {
        w.write_record(header.iter().map(|k| row.get(*k).map(csv_field).unwrap_or_default())).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    text.push_str(&String::from_utf8_lossy(&bytes));
    Ok(text)
}

pub fn to_json(out: &Output) -> Result<String> {
    let mut s = serde_json::to_string_pretty(out).map_err(|e| CliError::Numerical(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn render(out: &Output, format: Format) -> Result<String> {
    match format {
        Format::Json => to_json(out),
        Format::Csv => to_csv(out),
    }
}
