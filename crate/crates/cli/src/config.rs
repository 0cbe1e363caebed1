//! `--config FILE`: `key = value` lines supplying flags that are not given
//! on the command line.

use std::collections::HashMap;

/// Where a flag read from a config file came from.
#[derive(Clone, Debug)]
pub struct Origin {
    pub path: String,
    pub line: usize,
    pub key: String,
}

#[derive(Debug)]
pub struct ConfigError(pub String);

/// Removes `--config PATH` from `args` and appends the file's flags that
/// the command line does not already set.
pub fn expand(args: Vec<String>) -> Result<(Vec<String>, HashMap<String, Origin>), ConfigError> {
    let mut out = Vec::with_capacity(args.len());
    let mut path = None;
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            path = Some(it.next().ok_or_else(|| ConfigError("--config needs a file path".into()))?);
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else {
            out.push(a);
        }
    }
    let mut origins = HashMap::new();
    let Some(path) = path else {
        return Ok((out, origins));
    };
    let text = std::fs::read_to_string(&path).map_err(|e| ConfigError(format!("cannot read config {path}: {e}")))?;
    let present: Vec<String> = out
        .iter()
        .filter_map(|a| a.strip_prefix("--"))
        .map(|a| a.split('=').next().unwrap_or(a).to_string())
        .collect();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let Some((key, value)) = trimmed.split_once('=') else {
            return Err(ConfigError(format!("{path}:{line}: expected `key = value`, got `{trimmed}`")));
        };
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || key.starts_with('-') {
            return Err(ConfigError(format!("{path}:{line}: field `{key}`: invalid key")));
        }
        if present.iter().any(|p| p == key) {
            continue;
        }
        let flag = format!("--{key}");
        match value {
            "true" => out.push(flag.clone()),
            "false" => {}
            v => {
                out.push(flag.clone());
                out.push(v.to_string());
            }
        }
        origins.insert(
            flag,
            Origin {
                path: path.clone(),
                line,
                key: key.to_string(),
            },
        );
    }
    Ok((out, origins))
}
