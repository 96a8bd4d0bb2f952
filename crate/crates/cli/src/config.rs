//! Flat `key = value` config files, merged under command-line flags.

use std::path::Path;

use ncg_core::{Error, Result};

/// Parse `key = value` lines. Blank lines and `#` comments are skipped.
pub fn parse(text: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse { line: idx + 1, message: format!("expected `key = value`, found `{line}`") })?;
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        if key.is_empty() {
            return Err(Error::Parse { line: idx + 1, message: "empty key".into() });
        }
        pairs.push((key, value.trim().to_string()));
    }
    Ok(pairs)
}

fn flag_given(args: &[String], key: &str) -> bool {
    let long = format!("--{key}");
    let inline = format!("--{key}=");
    args.iter().any(|a| *a == long || a.starts_with(&inline))
}

/// Strip `--config PATH` from `args` and append the file's settings for
/// every flag not already given. Flags on the command line win.
pub fn merge(mut args: Vec<String>) -> Result<Vec<String>> {
    let Some(pos) = args.iter().position(|a| a == "--config" || a.starts_with("--config=")) else {
        return Ok(args);
    };
    let path = match args[pos].strip_prefix("--config=") {
        Some(p) => {
            let p = p.to_string();
            args.remove(pos);
            p
        }
        None => {
            if pos + 1 >= args.len() {
                return Err(Error::InvalidSize("--config needs a path".into()));
            }
            let p = args.remove(pos + 1);
            args.remove(pos);
            p
        }
    };
    let text = std::fs::read_to_string(Path::new(&path))?;
    for (key, value) in parse(&text)? {
        if flag_given(&args, &key) {
            continue;
        }
        match value.as_str() {
            "true" => args.push(format!("--{key}")),
            "false" => {}
            _ => {
                args.push(format!("--{key}"));
                args.push(value);
            }
        }
    }
    Ok(args)
}
