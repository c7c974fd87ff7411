//! Rendering of the result document.

use std::io::{self, Write};

use serde_json::{Map, Value};

use crate::error::CliError;
use crate::Report;

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

/// Starts a document with the schema version and command name.
pub fn document(command: &str) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("schema".into(), SCHEMA.into());
    m.insert("command".into(), command.into());
    m
}

pub fn emit(report: &Report, format: Format) -> Result<(), CliError> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, &report.doc).map_err(|e| CliError::Failure(e.to_string()))?;
            writeln!(out)?;
        }
        Format::Csv => write_csv(&report.doc, &mut out)?,
    }
    Ok(())
}

/// Documents with a `rows` array of flat objects print as a table; anything
/// else prints as `key,value` pairs with dotted paths.
pub fn write_csv<W: Write>(doc: &Value, out: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    match doc.get("rows").and_then(Value::as_array) {
        Some(rows) if !rows.is_empty() => {
            let header: Vec<&str> = rows[0].as_object().map(|o| o.keys().map(String::as_str).collect()).unwrap_or_default();
            w.write_record(&header)?;
            for row in rows {
                w.write_record(header.iter().map(|k| cell(row.get(*k).unwrap_or(&Value::Null))))?;
            }
        }
        _ => {
            w.write_record(["key", "value"])?;
            let mut pairs = Vec::new();
            flatten("", doc, &mut pairs);
            for (k, v) in pairs {
                w.write_record([k, v])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => m.iter().for_each(|(k, v)| flatten(&join(k), v, out)),
        Value::Array(a) => a.iter().enumerate().for_each(|(i, v)| flatten(&join(&i.to_string()), v, out)),
        leaf => out.push((prefix.to_string(), cell(leaf))),
    }
}

/// `null` for non-finite values so every number in the output is finite.
pub fn num(x: f64) -> Value {
    if x.is_finite() { x.into() } else { Value::Null }
}

pub fn opt(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

#[cfg(test)]
mod tests {
    use serde_json::json;

    use super::*;

    fn render(doc: &Value) -> String {
        let mut buf = Vec::new();
        write_csv(doc, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn rows_become_a_table() {
        let doc = json!({"schema": 1, "rows": [{"b": 0.5, "ratio": 3.0}, {"b": 0.75, "ratio": null}]});
        assert_eq!(render(&doc), "b,ratio\n0.5,3.0\n0.75,\n");
    }

    #[test]
    fn nested_documents_flatten_to_pairs() {
        let doc = json!({"schema": 1, "orbit": {"kind": "BrakeOrbit"}, "list": [1, "a, b"]});
        assert_eq!(render(&doc), "key,value\nschema,1\norbit.kind,BrakeOrbit\nlist.0,1\nlist.1,\"a, b\"\n");
    }

    #[test]
    fn non_finite_numbers_are_null() {
        assert_eq!(num(f64::NAN), Value::Null);
        assert_eq!(opt(Some(f64::INFINITY)), Value::Null);
        assert_eq!(num(2.5), json!(2.5));
    }
}
