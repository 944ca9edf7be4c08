//! Optional `key = value` configuration files.
//!
//! Keys are long flag names. Entries are spliced into the argument list right
//! after the subcommand unless the same flag already appears there, so the
//! command line always wins. Keys belonging to other subcommands are ignored,
//! which lets one file serve several commands.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::Command;
use critline_core::{Error, Result};

pub fn parse(text: &str) -> Result<Vec<(String, String)>> {
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Format {
            line: i + 1,
            msg: format!("expected `key = value`, got `{line}`"),
        })?;
        let key = key.trim();
        if key.is_empty() || key.contains(char::is_whitespace) {
            return Err(Error::Format {
                line: i + 1,
                msg: format!("bad key `{key}`"),
            });
        }
        entries.push((key.to_string(), value.trim().to_string()));
    }
    Ok(entries)
}

/// The value of `--config`, found before full parsing.
pub fn config_path(args: &[OsString]) -> Option<PathBuf> {
    let mut iter = args.iter().skip(1);
    while let Some(a) = iter.next() {
        let a = a.to_string_lossy();
        if a == "--" {
            break;
        }
        if a == "--config" {
            return iter.next().map(PathBuf::from);
        }
        if let Some(v) = a.strip_prefix("--config=") {
            return Some(PathBuf::from(v));
        }
    }
    None
}

fn long_names(cmd: &Command) -> impl Iterator<Item = (&str, bool)> {
    cmd.get_arguments()
        .filter_map(|a| a.get_long().map(|l| (l, a.get_action().takes_values())))
}

pub fn merge(args: Vec<OsString>, entries: &[(String, String)], cmd: &Command) -> Result<Vec<OsString>> {
    let position = args
        .iter()
        .enumerate()
        .skip(1)
        .find(|(_, a)| cmd.find_subcommand(a.to_string_lossy().as_ref()).is_some())
        .map(|(i, _)| i);
    let Some(position) = position else {
        return Ok(args);
    };
    let sub = cmd
        .find_subcommand(args[position].to_string_lossy().as_ref())
        .expect("position points at a subcommand");
    let given = |key: &str| {
        let flag = format!("--{key}");
        let with_value = format!("--{key}=");
        args.iter().any(|a| {
            let a = a.to_string_lossy();
            a == flag.as_str() || a.starts_with(&with_value)
        })
    };
    let mut spliced = Vec::new();
    for (key, value) in entries {
        if key == "config" {
            return Err(Error::Parameter("a config file cannot name another config file".into()));
        }
        let found = long_names(cmd)
            .chain(long_names(sub))
            .find(|(name, _)| *name == key.as_str());
        let Some((_, takes_value)) = found else {
            if cmd.get_subcommands().any(|s| long_names(s).any(|(name, _)| name == key.as_str())) {
                continue;
            }
            return Err(Error::Parameter(format!("unknown config key `{key}`")));
        };
        let arg = cmd
            .get_arguments()
            .chain(sub.get_arguments())
            .find(|a| a.get_long() == Some(key.as_str()))
            .expect("found above");
        let clashes = sub
            .get_arg_conflicts_with(arg)
            .iter()
            .filter_map(|a| a.get_long())
            .any(|l| given(l));
        if given(key) || clashes {
            continue;
        }
        if takes_value {
            spliced.push(OsString::from(format!("--{key}={value}")));
        } else {
            match value.as_str() {
                "true" => spliced.push(OsString::from(format!("--{key}"))),
                "false" => {}
                _ => return Err(Error::Parameter(format!("config key `{key}` needs true or false, got `{value}`"))),
            }
        }
    }
    let mut out = args;
    out.splice(position + 1..position + 1, spliced);
    Ok(out)
}
