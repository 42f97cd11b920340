//! `key = value` files that supply flag defaults.
//!
//! A key is a long flag name without the dashes (`h`, `bootstrap-reps`,
//! `seed`). Keys may be scoped to one subcommand as `tvc.h = 0.09`; scoped
//! keys for other subcommands are ignored. Boolean flags take `true` or
//! `false`. Lists are comma separated, as on the command line.

use std::ffi::OsString;
use std::path::Path;

use clap::CommandFactory;

use crate::args::Cli;
use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub scope: Option<String>,
    pub key: String,
    pub value: String,
}

pub fn parse(text: &str) -> Result<Vec<Entry>, CliError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("config line {}: expected key = value", i + 1)))?;
        let k = k.trim().replace('_', "-");
        let (scope, key) = match k.split_once('.') {
            Some((s, key)) => (Some(s.to_string()), key.to_string()),
            None => (None, k),
        };
        if key.is_empty() {
            return Err(CliError::Config(format!("config line {}: empty key", i + 1)));
        }
        out.push(Entry {
            scope,
            key,
            value: v.trim().trim_matches('"').to_string(),
        });
    }
    Ok(out)
}

/// Appends flags from the config file that the command line does not set.
pub fn merge(argv: &[OsString], path: &Path, subcommand: &str) -> Result<Vec<OsString>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let entries = parse(&text)?;
    let root = Cli::command();
    let sub = root
        .find_subcommand(subcommand)
        .ok_or_else(|| CliError::Config(format!("unknown subcommand {subcommand}")))?;
    let given = |key: &str| {
        let flag = format!("--{key}");
        let prefix = format!("--{key}=");
        argv.iter()
            .filter_map(|a| a.to_str())
            .any(|a| a == flag || a.starts_with(&prefix))
    };
    let mut extra: Vec<OsString> = Vec::new();
    for e in entries {
        if e.scope.as_deref().is_some_and(|s| s != subcommand) {
            continue;
        }
        if e.key == "config" {
            return Err(CliError::Config("a config file cannot name another config file".into()));
        }
        let arg = sub
            .get_arguments()
            .chain(root.get_arguments())
            .find(|a| a.get_long() == Some(e.key.as_str()))
            .ok_or_else(|| CliError::Config(format!("unknown config key {:?}", e.key)))?;
        if given(&e.key) {
            continue;
        }
        if arg.get_action().takes_values() {
            extra.push(format!("--{}", e.key).into());
            extra.push(e.value.into());
        } else {
            match e.value.as_str() {
                "true" => extra.push(format!("--{}", e.key).into()),
                "false" => {}
                v => return Err(CliError::Config(format!("config key {:?} expects true or false, got {v:?}", e.key))),
            }
        }
    }
    let mut out = argv.to_vec();
    out.extend(extra);
    Ok(out)
}
