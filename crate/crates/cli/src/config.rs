//! `key = value` config files. Entries are turned into command-line flags
//! placed before the user's own flags, so flags given explicitly win.

use std::collections::HashMap;
use std::ffi::OsString;
use std::fs;
use std::path::Path;

use clap::CommandFactory;

use crate::error::CliError;
use crate::Cli;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigEntry {
    pub line: usize,
    /// Long flag name, `-` separated.
    pub key: String,
    pub value: String,
}

pub fn parse_config(text: &str) -> Result<Vec<ConfigEntry>, CliError> {
    let mut entries: Vec<ConfigEntry> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Usage(format!(
                "config line {}: expected `key = value`",
                k + 1
            )));
        };
        let key = key.trim().replace('_', "-");
        if key.is_empty() {
            return Err(CliError::Usage(format!("config line {}: empty key", k + 1)));
        }
        let value = value.trim().trim_matches('"').to_owned();
        // a repeated key keeps the last value
        entries.retain(|e| e.key != key);
        entries.push(ConfigEntry { line: k + 1, key, value });
    }
    Ok(entries)
}

/// Value of `--config` in `args`, if present.
fn config_path(args: &[OsString]) -> Option<OsString> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(rest) = s.strip_prefix("--config=") {
            return Some(rest.into());
        }
    }
    None
}

/// Rewrites `args` so that entries of the config file (if any) precede the
/// user's flags for the chosen subcommand.
pub fn expand_args(args: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let path = Path::new(&path);
    if !path.is_file() {
        return Err(CliError::Usage(format!("config file {} not found", path.display())));
    }
    let entries = parse_config(&fs::read_to_string(path)?)?;

    let cli = Cli::command();
    let Some((pos, sub)) = args.iter().enumerate().skip(1).find_map(|(i, a)| {
        let name = a.to_string_lossy();
        cli.find_subcommand(name.as_ref()).map(|s| (i, s.clone()))
    }) else {
        return Ok(args);
    };

    // flags of every subcommand: a key meant for another one is skipped, a
    // key no subcommand knows is an error
    let mut known: HashMap<String, bool> = HashMap::new();
    for s in cli.get_subcommands() {
        for arg in s.get_arguments() {
            if let Some(long) = arg.get_long() {
                known.insert(long.to_owned(), arg.get_action().takes_values());
            }
        }
    }
    let mut injected: Vec<OsString> = Vec::new();
    for e in entries {
        if e.key == "config" {
            return Err(CliError::Usage(format!("config line {}: nested config files are not supported", e.line)));
        }
        let Some(&takes_value) = known.get(&e.key) else {
            return Err(CliError::Usage(format!("config line {}: unknown key `{}`", e.line, e.key)));
        };
        let Some(arg) = sub.get_arguments().find(|a| a.get_long() == Some(e.key.as_str())) else {
            continue;
        };
        let flag = format!("--{}", arg.get_long().unwrap_or_default());
        if takes_value {
            injected.push(format!("{flag}={}", e.value).into());
        } else {
            match e.value.as_str() {
                "true" | "yes" | "1" => injected.push(flag.into()),
                "false" | "no" | "0" => {}
                other => {
                    return Err(CliError::Usage(format!(
                        "config line {}: `{}` expects true or false, got `{other}`",
                        e.line, e.key
                    )))
                }
            }
        }
    }
    let mut out = args;
    out.splice(pos + 1..pos + 1, injected);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_underscores() {
        let entries = parse_config("# defaults\nmax_dim = 2\nzeta=0.2  # cropped\n\n").unwrap();
        assert_eq!(entries.len(), 2);
        assert_eq!(entries[0].key, "max-dim");
        assert_eq!(entries[1].value, "0.2");
        assert!(parse_config("zeta 0.2").is_err());
    }

    #[test]
    fn later_duplicates_replace_earlier() {
        let entries = parse_config("seed = 1\nseed = 4\n").unwrap();
        assert_eq!(entries, vec![ConfigEntry { line: 2, key: "seed".into(), value: "4".into() }]);
    }
}
