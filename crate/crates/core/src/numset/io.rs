//! Plain-text set files: one scalar per line, `#` starts a comment.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use thiserror::Error;

use super::NumSet;
use crate::scalar::{ParseScalarError, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DuplicatePolicy {
    /// Drop repeats and report them as warnings.
    Warn,
    #[default]
    Error,
}

#[derive(Debug, Error)]
pub enum SetFileError {
    #[error("line {line}: {source}")]
    Parse {
        line: usize,
        source: ParseScalarError,
    },
    #[error("line {line}: duplicate element {value}")]
    Duplicate { line: usize, value: Scalar },
    #[error("set file contains no elements")]
    Empty,
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Parses set-file text. Returns the set plus any duplicate warnings.
pub fn parse_set_file(
    text: &str,
    policy: DuplicatePolicy,
) -> Result<(NumSet, Vec<String>), SetFileError> {
    let mut items = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let value: Scalar = body.parse().map_err(|source| SetFileError::Parse {
            line: idx + 1,
            source,
        })?;
        items.push((idx + 1, value));
    }
    if items.is_empty() {
        return Err(SetFileError::Empty);
    }
    items.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)));
    let mut warnings = Vec::new();
    let mut unique: Vec<Scalar> = Vec::with_capacity(items.len());
    for (line, value) in items {
        if unique.last() == Some(&value) {
            match policy {
                DuplicatePolicy::Error => return Err(SetFileError::Duplicate { line, value }),
                DuplicatePolicy::Warn => {
                    warnings.push(format!("line {line}: duplicate element {value} ignored"))
                }
            }
        } else {
            unique.push(value);
        }
    }
    Ok((NumSet::from_sorted_unique(unique), warnings))
}

pub fn read_set_file(
    path: &Path,
    policy: DuplicatePolicy,
) -> Result<(NumSet, Vec<String>), SetFileError> {
    parse_set_file(&fs::read_to_string(path)?, policy)
}

/// Writes one element per line, ascending, with an optional header comment.
pub fn write_set_file<W: Write>(mut out: W, set: &NumSet, header: Option<&str>) -> io::Result<()> {
    if let Some(h) = header {
        for line in h.lines() {
            writeln!(out, "# {line}")?;
        }
    }
    for x in set.iter() {
        writeln!(out, "{x}")?;
    }
    out.flush()
}
