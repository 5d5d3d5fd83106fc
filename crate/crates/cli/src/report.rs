use std::io::{self, Write};

use serde::Serialize;

/// Bumped whenever a report field is renamed, removed, or changes meaning.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
struct Envelope<'a, T> {
    schema_version: u32,
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    seed: u64,
    report: &'a T,
}

/// Writes `report` as one JSON document, or as `key: value` lines taken
/// from its top-level fields.
pub fn emit<T: Serialize>(command: &str, seed: u64, report: &T, json: bool) -> io::Result<()> {
    let envelope = Envelope {
        schema_version: SCHEMA_VERSION,
        tool: "qverify",
        version: env!("CARGO_PKG_VERSION"),
        command,
        seed,
        report,
    };
    let mut out = io::stdout().lock();
    if json {
        serde_json::to_writer_pretty(&mut out, &envelope)?;
        writeln!(out)
    } else {
        writeln!(out, "{command} (qverify {}, seed {seed})", env!("CARGO_PKG_VERSION"))?;
        write_text(&mut out, &serde_json::to_value(report)?, "")
    }
}

fn write_text(out: &mut impl Write, value: &serde_json::Value, prefix: &str) -> io::Result<()> {
    use serde_json::Value;
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                match v {
                    Value::Object(_) => write_text(out, v, &key)?,
                    // long per-run logs are only useful in JSON
                    Value::Array(items) if items.len() > 8 => writeln!(out, "  {key}: [{} entries]", items.len())?,
                    Value::String(text) if text.contains('\n') => {
                        writeln!(out, "  {key}:")?;
                        for line in text.lines() {
                            writeln!(out, "    {line}")?;
                        }
                    }
                    Value::String(text) => writeln!(out, "  {key}: {text}")?,
                    _ => writeln!(out, "  {key}: {v}")?,
                }
            }
            Ok(())
        }
        other => writeln!(out, "  {prefix}: {other}"),
    }
}
