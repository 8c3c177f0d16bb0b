use std::fs::File;
use std::io::{self, Write};

use chui_lab_core::report::{SCHEMA, SCHEMA_VERSION};

use crate::OutputArgs;

/// Flat sweep data; CSV output appends a `schema` column.
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Table {
        Table {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push<I: IntoIterator<Item = String>>(&mut self, row: I) {
        self.rows.push(row.into_iter().collect());
    }
}

pub struct Outcome {
    pub result: serde_json::Value,
    pub table: Option<Table>,
    pub passed: bool,
}

fn writer(path: &str) -> io::Result<Box<dyn Write>> {
    Ok(if path == "-" {
        Box::new(io::stdout().lock())
    } else {
        Box::new(File::create(path)?)
    })
}

pub fn document(command: &str, config: serde_json::Value, outcome: &Outcome, elapsed: f64) -> serde_json::Value {
    let mut doc = serde_json::json!({
        "schema": SCHEMA,
        "schema_version": SCHEMA_VERSION,
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "config": config,
        "passed": outcome.passed,
        "runtime_seconds": elapsed,
    });
    let map = doc.as_object_mut().expect("object");
    match &outcome.result {
        serde_json::Value::Object(fields) => {
            for (k, v) in fields {
                if !map.contains_key(k) || k == "runtime_seconds" {
                    map.insert(k.clone(), v.clone());
                }
            }
        }
        other => {
            map.insert("result".into(), other.clone());
        }
    }
    doc
}

pub fn emit(
    command: &str,
    config: serde_json::Value,
    outcome: &Outcome,
    elapsed: f64,
    out: &OutputArgs,
) -> Result<(), Box<dyn std::error::Error>> {
    let seed = config["command"][command]["seed"].as_u64();
    let doc = document(command, config, outcome, elapsed);
    let json_target = match (&out.json, &out.csv) {
        (None, None) => Some("-"),
        (j, _) => j.as_deref(),
    };
    if let Some(path) = json_target {
        let mut w = writer(path)?;
        serde_json::to_writer_pretty(&mut w, &doc)?;
        writeln!(w)?;
    }
    if let Some(path) = &out.csv {
        let table = outcome
            .table
            .as_ref()
            .ok_or_else(|| format!("`{command}` has no tabular output; use --json"))?;
        let mut w = csv::Writer::from_writer(writer(path)?);
        let mut header: Vec<&str> = table.header.clone();
        header.push("schema");
        w.write_record(&header)?;
        let tag = format!("{SCHEMA}@{SCHEMA_VERSION}");
        for row in &table.rows {
            let mut r: Vec<&str> = row.iter().map(String::as_str).collect();
            r.push(&tag);
            w.write_record(&r)?;
        }
        w.flush()?;
    }
    let status = if outcome.passed { "passed" } else { "assertion failed" };
    match seed {
        Some(s) => eprintln!("{command}: {status} (seed {s})"),
        None => eprintln!("{command}: {status}"),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn result_fields_are_flattened() {
        let outcome = Outcome {
            result: serde_json::json!({ "value_sq": 2.0, "command": "ignored", "runtime_seconds": 7.0 }),
            table: None,
            passed: true,
        };
        let doc = document("norm", serde_json::json!({}), &outcome, 1.0);
        assert_eq!(doc["value_sq"], 2.0);
        assert_eq!(doc["command"], "norm");
        assert_eq!(doc["runtime_seconds"], 7.0);
        assert_eq!(doc["schema_version"], SCHEMA_VERSION);
    }
}
