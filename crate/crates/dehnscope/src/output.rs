//! Rendering a JSON payload as JSON or CSV. CSV is derived from the same
//! `Value`, so both formats carry identical numbers.

use serde_json::Value;

use crate::args::Format;

pub fn render(value: &Value, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(value).expect("JSON values always serialize");
            s.push('\n');
            s
        }
        Format::Csv => to_csv(value),
    }
}

fn flatten(prefix: &str, value: &Value, out: &mut Vec<(String, Value)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                flatten(&key(k), v, out);
            }
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten(&key(&i.to_string()), v, out);
            }
        }
        scalar => out.push((prefix.to_string(), scalar.clone())),
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Arrays of records become one row per record; anything else becomes
/// `key,value` rows with dotted keys.
fn to_csv(value: &Value) -> String {
    let mut out = String::new();
    match value {
        Value::Array(rows) if !rows.is_empty() && rows.iter().all(Value::is_object) => {
            let flat: Vec<Vec<(String, Value)>> = rows
                .iter()
                .map(|r| {
                    let mut f = Vec::new();
                    flatten("", r, &mut f);
                    f
                })
                .collect();
            let header: Vec<&str> = flat[0].iter().map(|(k, _)| k.as_str()).collect();
            out.push_str(&header.join(","));
            out.push('\n');
            for row in &flat {
                let cells: Vec<String> = header
                    .iter()
                    .map(|h| row.iter().find(|(k, _)| k == h).map_or(String::new(), |(_, v)| cell(v)))
                    .collect();
                out.push_str(&cells.join(","));
                out.push('\n');
            }
        }
        other => {
            let mut f = Vec::new();
            flatten("", other, &mut f);
            out.push_str("key,value\n");
            for (k, v) in f {
                out.push_str(&format!("{},{}\n", cell(&Value::String(k)), cell(&v)));
            }
        }
    }
    out
}
