//! Plain-text `key = value` experiment configs.
//!
//! A config supplies defaults for command-line flags: each key names a long
//! flag of the subcommand, and flags given on the command line win.

use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ConfigError {}

/// Parse `key = value` lines; `#` starts a comment, blank lines are skipped.
pub fn parse(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |m: &str| ConfigError { line: i + 1, message: m.to_string() };
        let (k, v) = line.split_once('=').ok_or_else(|| err("expected key = value"))?;
        let k = k.trim().replace('_', "-");
        if k.is_empty() || !k.chars().all(|c| c.is_ascii_alphanumeric() || c == '-') {
            return Err(err("bad key"));
        }
        if out.insert(k, v.trim().to_string()).is_some() {
            return Err(err("duplicate key"));
        }
    }
    Ok(out)
}

/// Append `--key value` for every config entry whose flag is not already on
/// the command line. `true`/`false` values stand for switches.
pub fn merge_into_args(args: &[String], config: &BTreeMap<String, String>) -> Vec<String> {
    let mut out = args.to_vec();
    for (k, v) in config {
        let flag = format!("--{k}");
        let given = args.iter().any(|a| a == &flag || a.starts_with(&format!("{flag}=")));
        if given {
            continue;
        }
        match v.as_str() {
            "true" => out.push(flag),
            "false" => {}
            _ => {
                out.push(flag);
                out.push(v.clone());
            }
        }
    }
    out
}
