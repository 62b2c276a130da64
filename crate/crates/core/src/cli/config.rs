use std::ffi::OsString;
use std::path::Path;

use clap::Command;

use crate::error::{Error, Result};

/// `key = value` pairs from a flat config file. Blank lines and lines
/// starting with `#` are skipped.
pub fn parse_config_text(text: &str, origin: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("{origin}:{}: expected 'key = value'", lineno + 1)))?;
        let key = key.trim();
        if key.is_empty() {
            return Err(Error::Config(format!("{origin}:{}: empty key", lineno + 1)));
        }
        out.push((key.to_string(), value.trim().to_string()));
    }
    Ok(out)
}

/// Position and value of `--config` in a subcommand's arguments.
fn find_config(args: &[OsString]) -> Result<Option<(std::ops::Range<usize>, OsString)>> {
    for (i, a) in args.iter().enumerate() {
        let s = a.to_string_lossy();
        if s == "--config" {
            let v = args
                .get(i + 1)
                .ok_or_else(|| Error::Config("--config needs a file path".into()))?;
            return Ok(Some((i..i + 2, v.clone())));
        }
        if let Some(v) = s.strip_prefix("--config=") {
            return Ok(Some((i..i + 1, OsString::from(v))));
        }
    }
    Ok(None)
}

fn given_on_command_line(args: &[OsString], long: &str) -> bool {
    let flag = format!("--{long}");
    let with_value = format!("--{long}=");
    args.iter().any(|a| {
        let s = a.to_string_lossy();
        s == flag || s.starts_with(&with_value)
    })
}

/// Expands `--config FILE` into flag tokens placed ahead of the explicit
/// flags. Keys must be long flag names of the chosen subcommand; keys that
/// also appear on the command line are dropped so the flag wins.
pub fn merge_config_file(cmd: &Command, argv: Vec<OsString>) -> Result<Vec<OsString>> {
    if argv.len() < 2 {
        return Ok(argv);
    }
    let Some(sub) = cmd.find_subcommand(&argv[1]) else {
        return Ok(argv);
    };
    let rest = &argv[2..];
    let Some((range, path)) = find_config(rest)? else {
        return Ok(argv);
    };
    let path = Path::new(&path);
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read config file {}: {e}", path.display())))?;
    let pairs = parse_config_text(&text, &path.display().to_string())?;
    let mut explicit: Vec<OsString> = rest[..range.start].to_vec();
    explicit.extend_from_slice(&rest[range.end..]);

    let mut merged: Vec<OsString> = argv[..2].to_vec();
    for (key, value) in pairs {
        if key == "config" {
            return Err(Error::Config("config files cannot include other config files".into()));
        }
        let arg = sub
            .get_arguments()
            .find(|a| a.get_long() == Some(key.as_str()))
            .ok_or_else(|| Error::Config(format!("unknown key '{key}' in {}", path.display())))?;
        if given_on_command_line(&explicit, &key) {
            continue;
        }
        if arg.get_action().takes_values() {
            merged.push(format!("--{key}").into());
            merged.push(value.into());
        } else {
            match value.as_str() {
                "true" => merged.push(format!("--{key}").into()),
                "false" => {}
                other => {
                    return Err(Error::Config(format!("key '{key}' expects true or false, got '{other}'")));
                }
            }
        }
    }
    merged.extend(explicit);
    Ok(merged)
}
