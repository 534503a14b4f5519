//! `key = value` config files, merged into the argument list so that clap
//! does all validation. Flags given on the command line win because they
//! come later and every flag overrides itself.

use std::fs;

pub const SUBCOMMANDS: [&str; 5] = ["verify", "lift-check", "reconstruct", "evolve", "ode"];

/// Pulls `--config PATH` out of `args` and splices the file's entries in
/// right after the subcommand.
pub fn expand(args: Vec<String>) -> Result<Vec<String>, String> {
    let mut rest = Vec::with_capacity(args.len());
    let mut path = None;
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            path = Some(it.next().ok_or("--config needs a path")?);
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else {
            rest.push(a);
        }
    }
    let Some(path) = path else { return Ok(rest) };
    let text = fs::read_to_string(&path).map_err(|e| format!("cannot read config {path}: {e}"))?;
    let (command, flags) = parse(&text)?;
    let pos = match rest.iter().position(|a| SUBCOMMANDS.contains(&a.as_str())) {
        Some(i) => {
            if let Some(c) = command {
                if rest[i] != c {
                    return Err(format!("config is for `{c}` but the command line asks for `{}`", rest[i]));
                }
            }
            i
        }
        None => {
            let command = command.ok_or("no subcommand given on the command line or in the config")?;
            let i = 1.min(rest.len());
            rest.insert(i, command);
            i
        }
    };
    let at = pos + 1;
    rest.splice(at..at, flags);
    Ok(rest)
}

/// Returns the optional `command` entry and the remaining entries as flags.
fn parse(text: &str) -> Result<(Option<String>, Vec<String>), String> {
    let mut command = None;
    let mut flags = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected `key = value`", n + 1))?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() {
            return Err(format!("config line {}: empty key", n + 1));
        }
        if key == "command" {
            command = Some(value.to_string());
            continue;
        }
        match value {
            "true" => flags.push(format!("--{key}")),
            "false" => {}
            _ => flags.push(format!("--{key}={value}")),
        }
    }
    Ok((command, flags))
}
