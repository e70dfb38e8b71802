//! CSV and JSON serialization of result tables.

use std::io::Write;

use chrono::{SecondsFormat, Utc};
use serde_json::{json, Map, Number, Value as Json};

use ecsim_core::{SweepTable, Value};

use crate::config::Format;
use crate::error::Result;

/// Metadata key whose value is excluded from reproducibility guarantees.
pub const TIMESTAMP_KEY: &str = "timestamp";

/// Version and timestamp entries placed ahead of the table's own metadata.
pub fn standard_metadata() -> Vec<(String, String)> {
    vec![
        (
            "generator".into(),
            concat!("ecsim ", env!("CARGO_PKG_VERSION")).into(),
        ),
        (
            TIMESTAMP_KEY.into(),
            Utc::now().to_rfc3339_opts(SecondsFormat::Secs, true),
        ),
    ]
}

fn metadata(table: &SweepTable) -> Vec<(String, String)> {
    let mut meta = standard_metadata();
    meta.extend(table.metadata.iter().cloned());
    meta
}

/// CSV with `# key: value` metadata lines ahead of the header row.
pub fn write_csv<W: Write>(table: &SweepTable, mut w: W) -> Result<()> {
    for (k, v) in metadata(table) {
        writeln!(w, "# {k}: {v}")?;
    }
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(&table.columns)?;
    for row in &table.rows {
        csv.write_record(row.iter().map(|v| v.to_string()))?;
    }
    csv.flush()?;
    Ok(())
}

fn json_value(v: &Value) -> Json {
    match v {
        Value::Int(i) => json!(i),
        Value::Float(x) => Number::from_f64(*x).map_or(Json::Null, Json::Number),
        Value::Text(s) => Json::String(s.clone()),
        Value::Missing => Json::Null,
    }
}

/// One object: `{"metadata": {...}, "rows": [{column: value, ...}, ...]}`.
pub fn write_json<W: Write>(table: &SweepTable, mut w: W) -> Result<()> {
    let meta: Map<String, Json> = metadata(table)
        .into_iter()
        .map(|(k, v)| (k, Json::String(v)))
        .collect();
    let rows: Vec<Json> = table
        .rows
        .iter()
        .map(|r| {
            Json::Object(
                table
                    .columns
                    .iter()
                    .zip(r)
                    .map(|(c, v)| (c.clone(), json_value(v)))
                    .collect(),
            )
        })
        .collect();
    serde_json::to_writer_pretty(&mut w, &json!({ "metadata": meta, "rows": rows }))?;
    writeln!(w)?;
    Ok(())
}

pub fn write_table<W: Write>(table: &SweepTable, format: Format, w: W) -> Result<()> {
    match format {
        Format::Csv => write_csv(table, w),
        Format::Json => write_json(table, w),
    }
}
