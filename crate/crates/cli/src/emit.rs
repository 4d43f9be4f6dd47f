//! Report emission: stdout, or an output directory with a manifest.

use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::args::Format;
use crate::config::render;

pub const SCHEMA_VERSION: u32 = 1;

pub struct Report {
    pub json: Value,
    pub csv: String,
}

impl Report {
    /// Adds `schema_version` to the top level of a serialized report.
    pub fn new(body: &impl Serialize, csv: String) -> Report {
        let mut json = serde_json::to_value(body).expect("reports serialize");
        match json {
            Value::Object(ref mut m) => {
                m.insert("schema_version".into(), json!(SCHEMA_VERSION));
            }
            other => json = json!({ "schema_version": SCHEMA_VERSION, "report": other }),
        }
        Report { json, csv }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn artifacts(command: &str, format: Format, report: &Report) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    if matches!(format, Format::Json | Format::Both) {
        let mut s = serde_json::to_string_pretty(&report.json).expect("json");
        s.push('\n');
        out.push((format!("{command}.json"), s.into_bytes()));
    }
    if matches!(format, Format::Csv | Format::Both) {
        out.push((format!("{command}.csv"), report.csv.clone().into_bytes()));
    }
    out
}

pub fn emit(command: &str, resolved: &Value, format: Format, out_dir: Option<&str>, report: &Report) -> std::io::Result<()> {
    let files = artifacts(command, format, report);
    let Some(dir) = out_dir else {
        for (_, bytes) in &files {
            print!("{}", String::from_utf8_lossy(bytes));
        }
        return Ok(());
    };
    let dir = Path::new(dir);
    fs::create_dir_all(dir)?;
    let cfg = render(resolved);
    fs::write(dir.join("run.cfg"), &cfg)?;
    let mut listed = Vec::new();
    for (name, bytes) in &files {
        fs::write(dir.join(name), bytes)?;
        listed.push(json!({ "file": name, "sha256": sha256_hex(bytes), "bytes": bytes.len() }));
    }
    let manifest = json!({
        "schema_version": SCHEMA_VERSION,
        "tool": "normwalk",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "config": resolved,
        "config_sha256": sha256_hex(cfg.as_bytes()),
        "artifacts": listed,
    });
    let mut s = serde_json::to_string_pretty(&manifest).expect("json");
    s.push('\n');
    fs::write(dir.join("manifest.json"), s)?;
    eprintln!("wrote {} artifact(s) to {}", files.len(), dir.display());
    Ok(())
}
