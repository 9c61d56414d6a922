//! `--config file` support: `key = value` lines appended to the command line
//! for every key not already given explicitly.

use std::ffi::OsString;
use std::fs;

use tat_core::TatError;

fn config_path(args: &[OsString]) -> Result<Option<OsString>, TatError> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return match it.next() {
                Some(p) => Ok(Some(p.clone())),
                None => Err(TatError::InvalidArgument("--config needs a path".into())),
            };
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Ok(Some(p.into()));
        }
    }
    Ok(None)
}

fn given(args: &[OsString], flag: &str) -> bool {
    let eq = format!("{flag}=");
    args.iter().any(|a| {
        let s = a.to_string_lossy();
        s == flag || s.starts_with(&eq)
    })
}

/// Returns `args` with the config file's settings merged underneath the
/// explicit flags. Boolean flags take `true`/`false`.
pub fn merge(args: Vec<OsString>) -> Result<Vec<OsString>, TatError> {
    let Some(path) = config_path(&args)? else {
        return Ok(args);
    };
    let text = fs::read_to_string(&path)
        .map_err(|e| TatError::InvalidArgument(format!("cannot read config {}: {e}", path.to_string_lossy())))?;
    let mut out = args.clone();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(TatError::Parse { line: lineno + 1, msg: format!("expected key=value, got {line:?}") });
        };
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        let value = value.trim();
        if key.is_empty() || key == "config" {
            return Err(TatError::Parse { line: lineno + 1, msg: format!("invalid key {key:?}") });
        }
        let flag = format!("--{key}");
        if given(&args, &flag) {
            continue;
        }
        match value {
            "true" => out.push(flag.into()),
            "false" => {}
            v => out.push(format!("{flag}={v}").into()),
        }
    }
    Ok(out)
}
