use std::io::Write;
use std::path::Path;

use serde_json::Value;

use crate::{CliError, Format};

/// Writes `report` as pretty JSON or as CSV. CSV has one row per entry of
/// `cases` when present, otherwise `key,value` rows for the scalar fields.
pub fn emit(report: &Value, format: Format, out: Option<&Path>) -> Result<(), CliError> {
    let text = match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("reports are valid JSON");
            s.push('\n');
            s
        }
        Format::Csv => to_csv(report)?,
    };
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

/// Flattens one level of nested objects as `outer.inner`.
fn flatten(v: &Value) -> Vec<(String, String)> {
    let mut out = Vec::new();
    if let Value::Object(m) = v {
        for (k, x) in m {
            match x {
                Value::Object(inner) => {
                    for (k2, y) in inner {
                        out.push((format!("{k}.{k2}"), cell(y)));
                    }
                }
                _ => out.push((k.clone(), cell(x))),
            }
        }
    }
    out
}

fn to_csv(report: &Value) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Input(e.to_string());
    match report.get("cases").and_then(Value::as_array) {
        Some(cases) if !cases.is_empty() => {
            let header: Vec<String> = flatten(&cases[0]).into_iter().map(|(k, _)| k).collect();
            w.write_record(&header).map_err(csv_err)?;
            for c in cases {
                let row: Vec<String> = flatten(c).into_iter().map(|(_, v)| v).collect();
                w.write_record(&row).map_err(csv_err)?;
            }
        }
        _ => {
            w.write_record(["key", "value"]).map_err(csv_err)?;
            if let Value::Object(m) = report {
                for (k, v) in m {
                    if !v.is_object() && !v.is_array() {
                        w.write_record([k.as_str(), &cell(v)]).map_err(csv_err)?;
                    }
                }
            }
        }
    }
    let bytes = w.into_inner().map_err(|e| CliError::Input(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn csv_cases() {
        let r = json!({"schema": 1, "cases": [
            {"params": {"n": 3, "l": 2}, "expected": "5", "ok": true},
            {"params": {"n": 3, "l": 3}, "expected": "7", "ok": false},
        ]});
        assert_eq!(
            to_csv(&r).unwrap(),
            "expected,ok,params.l,params.n\n5,true,2,3\n7,false,3,3\n"
        );
    }

    #[test]
    fn csv_scalars() {
        let r = json!({"schema": 1, "value": "21", "nested": {"x": 1}});
        assert_eq!(to_csv(&r).unwrap(), "key,value\nschema,1\nvalue,21\n");
    }
}
