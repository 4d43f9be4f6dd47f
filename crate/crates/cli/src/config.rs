//! `key = value` run files and their merge with command-line flags.

use std::fs;

use serde_json::Value;

pub fn parse_file(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| format!("config line {}: expected key = value", i + 1))?;
        let k = k.trim();
        if k.is_empty() {
            return Err(format!("config line {}: empty key", i + 1));
        }
        out.push((k.to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn config_path(argv: &[String]) -> Option<String> {
    let mut it = argv.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(p.to_string());
        }
    }
    None
}

/// Splices file entries in right after the subcommand, so that later flags
/// from the command line override them.
pub fn merge_argv(argv: Vec<String>) -> Result<Vec<String>, String> {
    let Some(path) = config_path(&argv) else {
        return Ok(argv);
    };
    let text = fs::read_to_string(&path).map_err(|e| format!("cannot read config {path}: {e}"))?;
    let mut injected = Vec::new();
    for (k, v) in parse_file(&text)? {
        match v.as_str() {
            "true" => injected.push(format!("--{k}")),
            "false" => {}
            _ => injected.push(format!("--{k}={v}")),
        }
    }
    // argv[0] is the binary, argv[1] the subcommand
    let split = argv.iter().skip(1).position(|a| !a.starts_with('-')).map(|p| p + 2).unwrap_or(argv.len());
    let mut out = argv[..split].to_vec();
    out.extend(injected);
    out.extend_from_slice(&argv[split..]);
    Ok(out)
}

/// Renders resolved parameters in the file format read by [`parse_file`].
pub fn render(resolved: &Value) -> String {
    let mut out = String::new();
    if let Value::Object(map) = resolved {
        for (k, v) in map {
            let s = match v {
                Value::Null => continue,
                Value::Bool(false) => continue,
                Value::Array(items) if items.is_empty() => continue,
                Value::Array(items) => items.iter().map(scalar).collect::<Vec<_>>().join(","),
                other => scalar(other),
            };
            out.push_str(&format!("{k} = {s}\n"));
        }
    }
    out
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
