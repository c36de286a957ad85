//! `--config FILE` support.
//!
//! Each `key = value` line becomes the `JACKDIV_KEY` environment default of
//! the flag `--key`, so explicit flags and real environment variables win
//! over the file.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fs;
use std::path::Path;

use clap::Command;

pub fn env_name(key: &str) -> String {
    format!("JACKDIV_{}", key.trim().trim_start_matches("--").replace('-', "_").to_ascii_uppercase())
}

/// The `--config` value, if any, scanned from raw arguments.
pub fn config_path(args: &[OsString]) -> Option<OsString> {
    let mut it = args.iter().skip(1);
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--" {
            break;
        }
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(v) = s.strip_prefix("--config=") {
            return Some(v.into());
        }
    }
    None
}

fn known_env(cmd: &Command, out: &mut BTreeSet<String>) {
    for a in cmd.get_arguments() {
        if let Some(e) = a.get_env() {
            out.insert(e.to_string_lossy().into_owned());
        }
    }
    for s in cmd.get_subcommands() {
        known_env(s, out);
    }
}

/// Parses the file into `(ENV_NAME, value)` pairs, rejecting unknown keys.
pub fn read(path: &Path, cmd: &Command) -> Result<Vec<(String, String)>, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    let mut known = BTreeSet::new();
    known_env(cmd, &mut known);
    let mut out = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(format!("{}:{}: expected key=value", path.display(), no + 1));
        };
        let name = env_name(k);
        if !known.contains(&name) {
            return Err(format!("{}:{}: unknown key {:?}", path.display(), no + 1, k.trim()));
        }
        out.push((name, v.trim().to_string()));
    }
    Ok(out)
}
