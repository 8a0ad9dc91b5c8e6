//! Reading and writing the on-disk formats: set files, function files, and
//! JSON artifacts. All writes are LF-terminated and byte-deterministic.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::func::TaggedFunction;
use crate::set::DiscreteSet;

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })
}

fn with_path_context(path: &Path, err: Error) -> Error {
    match err {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        Error::Validation(m) => Error::Validation(format!("{}: {m}", path.display())),
        other => other,
    }
}

pub fn read_set(path: &Path) -> Result<DiscreteSet> {
    let text = read_text(path)?;
    DiscreteSet::from_lines(&text).map_err(|e| with_path_context(path, e))
}

pub fn write_set(path: &Path, set: &DiscreteSet) -> Result<()> {
    write_text(path, &set.to_lines())
}

pub fn read_fn(path: &Path) -> Result<TaggedFunction> {
    let text = read_text(path)?;
    TaggedFunction::from_lines(&text).map_err(|e| with_path_context(path, e))
}

pub fn write_fn(path: &Path, func: &TaggedFunction) -> Result<()> {
    write_text(path, &func.to_lines())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = read_text(path)?;
    serde_json::from_str(&text)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_text(path, &to_json_string(value)?)
}

/// Pretty-printed JSON with a trailing newline; the single source of JSON
/// formatting so files and stdout agree byte for byte.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}
