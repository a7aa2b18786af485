//! `key=value` run files. Each key names a long flag; flags given on the
//! command line override the file.

use std::ffi::OsString;
use std::path::Path;

pub const SUBCOMMANDS: &[&str] = &["cov", "car", "match", "figure1", "sample", "fit", "ergodicity"];

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunFile {
    pub command: Option<String>,
    pub entries: Vec<(String, String)>,
}

pub fn parse(text: &str) -> Result<RunFile, String> {
    let mut file = RunFile::default();
    for (number, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {} is not key=value: {line}", number + 1))?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() {
            return Err(format!("config line {} has an empty key", number + 1));
        }
        if key == "config" {
            return Err("config files cannot include other config files".into());
        }
        if key == "command" {
            file.command = Some(value.to_string());
        } else {
            file.entries.push((key.replace('_', "-"), value.to_string()));
        }
    }
    Ok(file)
}

pub fn load(path: &Path) -> Result<RunFile, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    parse(&text)
}

impl RunFile {
    /// Flags for the entries. Boolean entries become bare switches when true
    /// and are dropped when false.
    fn flags(&self) -> Vec<OsString> {
        let mut flags = Vec::new();
        for (key, value) in &self.entries {
            match value.as_str() {
                "true" => flags.push(format!("--{key}").into()),
                "false" => {}
                _ => {
                    flags.push(format!("--{key}").into());
                    flags.push(value.into());
                }
            }
        }
        flags
    }
}

/// Value of `--config` in raw arguments, if any.
pub fn config_path(args: &[OsString]) -> Option<OsString> {
    let mut iter = args.iter().skip(1);
    while let Some(arg) = iter.next() {
        let text = arg.to_string_lossy();
        if text == "--config" {
            return iter.next().cloned();
        }
        if let Some(path) = text.strip_prefix("--config=") {
            return Some(path.into());
        }
    }
    None
}

/// Splices the file's flags in front of the command-line flags, right after
/// the subcommand, so later (command-line) occurrences win.
pub fn merge(args: Vec<OsString>, file: &RunFile) -> Vec<OsString> {
    let position = args.iter().position(|a| SUBCOMMANDS.contains(&a.to_string_lossy().as_ref()));
    let mut merged: Vec<OsString> = Vec::with_capacity(args.len() + 2 * file.entries.len() + 1);
    match position {
        Some(p) => {
            merged.extend(args[..=p].iter().cloned());
            merged.extend(file.flags());
            merged.extend(args[p + 1..].iter().cloned());
        }
        None => {
            merged.extend(args.iter().cloned());
            if let Some(command) = &file.command {
                merged.push(command.into());
            }
            merged.extend(file.flags());
        }
    }
    merged
}
