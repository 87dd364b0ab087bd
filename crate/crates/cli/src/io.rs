//! Field files on disk. Paths ending in `.csv` use the text form, anything
//! else the binary `RZF1` layout.

use std::fs;
use std::path::{Path, PathBuf};

use rieszkit::format::{self, FormatError};
use rieszkit::Field;

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source} [{}]", source.code())]
    Format { path: PathBuf, source: FormatError },
}

fn is_text(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

pub fn read_field(path: &Path) -> Result<Field, IoError> {
    let io = |source| IoError::Io { path: path.into(), source };
    let parsed = if is_text(path) {
        format::from_text(&fs::read_to_string(path).map_err(io)?)
    } else {
        format::decode(&fs::read(path).map_err(io)?)
    };
    parsed.map_err(|source| IoError::Format { path: path.into(), source })
}

pub fn write_field(f: &Field, path: &Path) -> Result<(), IoError> {
    let bytes = if is_text(path) { format::to_text(f).into_bytes() } else { format::encode(f) };
    fs::write(path, bytes).map_err(|source| IoError::Io { path: path.into(), source })
}
