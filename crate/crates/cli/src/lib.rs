//! Command-line front end for the `groupcut` engine: input resolution,
//! reports, SVG diagrams and seeded random search.

pub mod family;
pub mod report;
pub mod rng;
pub mod search;
pub mod svg;

use std::collections::BTreeMap;
use std::path::Path;

use groupcut::compendium::{construct, entry, EntryStatus};
use groupcut::PwlPeriodic;
use thiserror::Error;

use crate::report::InputDescriptor;

/// `sysexits.h` codes.
pub mod exit {
    pub const USAGE: i32 = 64;
    pub const DATA: i32 = 65;
    pub const SOFTWARE: i32 = 70;
    pub const IO: i32 = 74;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("bad family spec: {0}")]
    BadFamilySpec(String),
    #[error(transparent)]
    Core(#[from] groupcut::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {message}")]
    BadFile { path: String, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => exit::USAGE,
            CliError::Core(groupcut::Error::InternalInconsistency(_)) => exit::SOFTWARE,
            CliError::Io { .. } => exit::IO,
            _ => exit::DATA,
        }
    }
}

/// Parses `k=v` pairs.
pub fn parse_params(raw: &[String]) -> Result<BTreeMap<String, String>, CliError> {
    raw.iter()
        .map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| CliError::Usage(format!("expected key=value, got {kv:?}")))
        })
        .collect()
}

pub fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// The function named by a catalog entry and parameters, or read from a JSON
/// file of breakpoint records.
pub fn resolve(
    name: Option<&str>,
    params: &[String],
    file: Option<&Path>,
) -> Result<(InputDescriptor, PwlPeriodic), CliError> {
    match (name, file) {
        (Some(name), None) => {
            let params = parse_params(params)?;
            let pi = construct(name, &params)?;
            Ok((
                InputDescriptor::Constructor {
                    constructor: name.to_string(),
                    params,
                },
                pi,
            ))
        }
        (None, Some(path)) => {
            let text = read_file(path)?;
            let pi: PwlPeriodic = serde_json::from_str(&text).map_err(|e| CliError::BadFile {
                path: path.display().to_string(),
                message: e.to_string(),
            })?;
            Ok((
                InputDescriptor::File {
                    file: path.display().to_string(),
                },
                pi,
            ))
        }
        _ => Err(CliError::Usage("give either a function name or --file".into())),
    }
}

/// Parameter constraints and citation of every constructible entry.
pub fn constraints_help() -> String {
    let mut s = String::from("Constructible functions:\n");
    for e in groupcut::compendium::catalog() {
        if e.status == EntryStatus::Constructible {
            s.push_str(&entry_help(e.name));
        }
    }
    s
}

pub fn entry_help(name: &str) -> String {
    let Some(e) = entry(name) else {
        return String::new();
    };
    let mut s = format!("  {}\n", e.name);
    for (p, c) in &e.parameters {
        s.push_str(&format!("    {p}: {c}\n"));
    }
    s.push_str(&format!("    source: {}\n", e.citation));
    s
}
