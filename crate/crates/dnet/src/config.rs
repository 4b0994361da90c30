//! `key = value` configuration files.
//!
//! Each key names a long flag of the chosen subcommand (`metric = extreme-l2`
//! acts like `--metric extreme-l2`). `true` turns a switch on, `false` leaves
//! it off. Flags given on the command line win over the file. Blank lines and
//! lines starting with `#` are ignored.

use std::collections::BTreeMap;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
#[error("config line {line}: {message}")]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(ConfigError {
                line: i + 1,
                message: format!("expected key = value, got '{line}'"),
            });
        };
        let key = k.trim().trim_start_matches("--").replace('_', "-");
        if key.is_empty() || key.contains(char::is_whitespace) {
            return Err(ConfigError {
                line: i + 1,
                message: format!("bad key '{}'", k.trim()),
            });
        }
        out.insert(key, v.trim().to_string());
    }
    Ok(out)
}

/// Appends the config entries to `args` as flags, skipping keys already
/// present on the command line.
pub fn merge_args(args: &[String], config: &BTreeMap<String, String>) -> Vec<String> {
    let given = |key: &str| {
        let flag = format!("--{key}");
        args.iter().any(|a| *a == flag || a.starts_with(&format!("{flag}=")))
    };
    let mut out = args.to_vec();
    for (k, v) in config {
        if given(k) {
            continue;
        }
        match v.as_str() {
            "true" => out.push(format!("--{k}")),
            "false" => {}
            _ => {
                out.push(format!("--{k}"));
                out.push(v.clone());
            }
        }
    }
    out
}

/// Removes `--config PATH` (or `--config=PATH`) and returns the path.
pub fn take_config_flag(args: &mut Vec<String>) -> Option<String> {
    let i = args.iter().position(|a| a == "--config" || a.starts_with("--config="))?;
    let a = args.remove(i);
    match a.strip_prefix("--config=") {
        Some(p) => Some(p.to_string()),
        None if i < args.len() => Some(args.remove(i)),
        None => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[&str]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn parses_and_merges() {
        let cfg = parse_config("# run\nmetric = extreme-l2\n\nexact=true\nthreads = 2\nquiet = false\n").unwrap();
        let args = s(&["dnet", "eval", "--threads", "4"]);
        let merged = merge_args(&args, &cfg);
        assert_eq!(merged, s(&["dnet", "eval", "--threads", "4", "--exact", "--metric", "extreme-l2"]));
    }

    #[test]
    fn rejects_lines_without_equals() {
        assert_eq!(parse_config("a=1\nnonsense\n").unwrap_err().line, 2);
    }

    #[test]
    fn config_flag_is_extracted() {
        let mut a = s(&["dnet", "--config", "x.cfg", "eval"]);
        assert_eq!(take_config_flag(&mut a).as_deref(), Some("x.cfg"));
        assert_eq!(a, s(&["dnet", "eval"]));
        let mut b = s(&["dnet", "eval", "--config=y"]);
        assert_eq!(take_config_flag(&mut b).as_deref(), Some("y"));
        assert_eq!(take_config_flag(&mut b), None);
    }
}
