//! Table serialization: CSV and JSON renderings of a [`SeriesTable`], plus
//! the reproducibility sidecar written next to file outputs.
//!
//! Data files are a pure function of the configuration — they carry no
//! timestamps or host details, so identical invocations are byte-identical.
//! Volatile provenance (wall time, the exact command line) goes into the
//! `<out>.meta.json` sidecar instead.

use std::path::Path;

use bsjc::SeriesTable;
use serde_json::{json, Map, Value};

/// CSV with a header row and one `{:.16e}` cell per value: 17 significant
/// digits, round-trip exact for f64. Every row, including the last, is
/// newline-terminated.
pub fn render_csv(t: &SeriesTable) -> String {
    let mut s = String::with_capacity(64 + 24 * t.rows.len() * t.columns.len());
    s.push_str(&t.columns.join(","));
    s.push('\n');
    for row in &t.rows {
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            s.push_str(&format!("{v:.16e}"));
        }
        s.push('\n');
    }
    s
}

/// One JSON object `{"meta": {...}, "rows": [[...], ...]}` with rows as
/// arrays in header order; column names ride in `meta.columns`.
pub fn render_json(t: &SeriesTable) -> String {
    let mut meta = Map::new();
    for (k, v) in &t.meta {
        meta.insert(k.clone(), Value::String(v.clone()));
    }
    meta.insert(
        "columns".into(),
        Value::Array(t.columns.iter().map(|c| Value::String((*c).into())).collect()),
    );
    let rows: Vec<Value> = t
        .rows
        .iter()
        .map(|row| {
            Value::Array(
                row.iter()
                    .map(|&v| {
                        // SeriesTable guarantees finiteness, so this cannot fail.
                        Value::Number(serde_json::Number::from_f64(v).expect("finite cell"))
                    })
                    .collect(),
            )
        })
        .collect();
    let mut doc = serde_json::to_string(&json!({ "meta": Value::Object(meta), "rows": rows }))
        .expect("JSON serialization of plain numbers/strings cannot fail");
    doc.push('\n');
    doc
}

/// Write the reproducibility sidecar `<out>.meta.json` for a file output.
pub fn write_sidecar(
    out: &Path,
    t: &SeriesTable,
    command: &str,
    wall_time_seconds: f64,
) -> std::io::Result<()> {
    let unix_time = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let mut meta = Map::new();
    for (k, v) in &t.meta {
        meta.insert(k.clone(), Value::String(v.clone()));
    }
    let doc = json!({
        "command": command,
        "columns": t.columns,
        "row_count": t.rows.len(),
        "meta": Value::Object(meta),
        "wall_time_seconds": wall_time_seconds,
        "written_unix_time": unix_time,
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("sidecar serialization");
    text.push('\n');
    std::fs::write(sidecar_path(out), text)
}

pub fn sidecar_path(out: &Path) -> std::path::PathBuf {
    let mut name = out.as_os_str().to_os_string();
    name.push(".meta.json");
    std::path::PathBuf::from(name)
}
