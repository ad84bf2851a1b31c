//! Output tables. Every command produces a list of JSON objects; CSV is a
//! flattening of the same values, so both formats carry identical numbers.

use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use clap::ValueEnum;
use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

pub type Row = Map<String, Value>;

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, out);
            }
        }
        Value::Array(xs) => {
            let parts: Vec<String> = xs.iter().map(cell).collect();
            out.push((prefix.to_string(), parts.join(";")));
        }
        _ => out.push((prefix.to_string(), cell(v))),
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Array(_) | Value::Object(_) => v.to_string(),
        other => other.to_string(),
    }
}

fn to_csv(rows: &[Row]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Option<Vec<String>> = None;
    for row in rows {
        let mut cells = Vec::new();
        flatten("", &Value::Object(row.clone()), &mut cells);
        let keys: Vec<String> = cells.iter().map(|c| c.0.clone()).collect();
        match &header {
            None => {
                w.write_record(&keys)?;
                header = Some(keys);
            }
            Some(h) if *h != keys => anyhow::bail!("rows with different columns cannot share a CSV table"),
            _ => {}
        }
        w.write_record(cells.iter().map(|c| c.1.as_str()))?;
    }
    Ok(w.into_inner()?)
}

pub fn render(rows: &[Row], format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(rows)?;
            s.push('\n');
            Ok(s.into_bytes())
        }
        Format::Csv => to_csv(rows),
    }
}

pub fn emit(rows: &[Row], format: Format, out: Option<&Path>) -> Result<()> {
    let bytes = render(rows, format)?;
    match out {
        Some(p) => std::fs::write(p, bytes).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(&bytes)?;
            Ok(())
        }
    }
}
