//! Byte and text encodings of [`Field`].
//!
//! Binary layout, little-endian: the magic `RZF1`, `u32 d`, `u32 dims[d]`,
//! `f64 h`, `f64 origin[d]`, then `dims[0] * .. * dims[d-1]` values in
//! row-major order. The text form has a header line `# d n h origin..`
//! followed by one value per line.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::grid::{Field, GridSpec, MAX_DIM};
use crate::Error;

pub const MAGIC: [u8; 4] = *b"RZF1";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FormatError {
    #[error("bad magic")]
    BadMagic,
    #[error("truncated payload: needed {needed} bytes, found {found}")]
    Truncated { needed: usize, found: usize },
    #[error("unsupported dimension {0}")]
    UnsupportedDimension(u64),
    #[error("non-finite value at index {0}")]
    NonFinite(usize),
    #[error("{0} trailing bytes after the payload")]
    TrailingBytes(usize),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("line {line}: {reason}")]
    Text { line: usize, reason: String },
}

impl FormatError {
    /// Stable short code, one per variant.
    pub fn code(&self) -> &'static str {
        match self {
            FormatError::BadMagic => "bad-magic",
            FormatError::Truncated { .. } => "truncated",
            FormatError::UnsupportedDimension(_) => "unsupported-dimension",
            FormatError::NonFinite(_) => "non-finite",
            FormatError::TrailingBytes(_) => "trailing-bytes",
            FormatError::InvalidGrid(_) => "invalid-grid",
            FormatError::Text { .. } => "bad-text",
        }
    }
}

fn grid_error(e: Error) -> FormatError {
    match e {
        Error::UnsupportedDimension(d) => FormatError::UnsupportedDimension(d as u64),
        Error::NonFinite(k) => FormatError::NonFinite(k),
        other => FormatError::InvalidGrid(format!("{other}")),
    }
}

pub fn encode(f: &Field) -> Vec<u8> {
    let s = &f.spec;
    let mut out = Vec::with_capacity(8 + 4 * s.d + 8 * (1 + s.d + f.values.len()));
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&(s.d as u32).to_le_bytes());
    for _ in 0..s.d {
        out.extend_from_slice(&(s.n as u32).to_le_bytes());
    }
    out.extend_from_slice(&s.h.to_le_bytes());
    for o in &s.origin[..s.d] {
        out.extend_from_slice(&o.to_le_bytes());
    }
    for v in &f.values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take<const N: usize>(&mut self) -> Result<[u8; N], FormatError> {
        let end = self.pos + N;
        let chunk = self
            .bytes
            .get(self.pos..end)
            .ok_or(FormatError::Truncated { needed: end, found: self.bytes.len() })?;
        self.pos = end;
        Ok(chunk.try_into().expect("chunk length"))
    }

    fn u32(&mut self) -> Result<u32, FormatError> {
        self.take::<4>().map(u32::from_le_bytes)
    }

    fn f64(&mut self) -> Result<f64, FormatError> {
        self.take::<8>().map(f64::from_le_bytes)
    }
}

pub fn decode(bytes: &[u8]) -> Result<Field, FormatError> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take::<4>().map_err(|_| FormatError::BadMagic)? != MAGIC {
        return Err(FormatError::BadMagic);
    }
    let d = r.u32()? as usize;
    if !(1..=MAX_DIM).contains(&d) {
        return Err(FormatError::UnsupportedDimension(d as u64));
    }
    let mut dims = [0usize; MAX_DIM];
    for v in dims.iter_mut().take(d) {
        *v = r.u32()? as usize;
    }
    if dims[..d].iter().any(|&m| m != dims[0]) {
        return Err(FormatError::InvalidGrid(format!("dims {:?} are not all equal", &dims[..d])));
    }
    let h = r.f64()?;
    let mut origin = [0.0; MAX_DIM];
    for o in origin.iter_mut().take(d) {
        *o = r.f64()?;
    }
    let spec = GridSpec::new(d, dims[0], h, origin).map_err(grid_error)?;
    let needed = r.pos + 8 * spec.len();
    if bytes.len() < needed {
        return Err(FormatError::Truncated { needed, found: bytes.len() });
    }
    if bytes.len() > needed {
        return Err(FormatError::TrailingBytes(bytes.len() - needed));
    }
    let values = (0..spec.len()).map(|_| r.f64()).collect::<Result<Vec<_>, _>>()?;
    Field::new(spec, values).map_err(grid_error)
}

/// Shortest round-trip decimal form of every number, so parsing is lossless.
pub fn to_text(f: &Field) -> String {
    let s = &f.spec;
    let mut out = format!("# {} {} {}", s.d, s.n, s.h);
    for o in &s.origin[..s.d] {
        let _ = write!(out, " {o}");
    }
    out.push('\n');
    for v in &f.values {
        let _ = writeln!(out, "{v}");
    }
    out
}

pub fn from_text(text: &str) -> Result<Field, FormatError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let bad = |line: usize, reason: &str| FormatError::Text { line: line + 1, reason: reason.into() };
    let (hl, header) = lines.next().ok_or_else(|| bad(0, "missing header"))?;
    let tokens: Vec<&str> = header
        .trim()
        .strip_prefix('#')
        .ok_or_else(|| bad(hl, "header must start with `#`"))?
        .split_whitespace()
        .collect();
    let d: usize = tokens.first().and_then(|t| t.parse().ok()).ok_or_else(|| bad(hl, "bad dimension"))?;
    if !(1..=MAX_DIM).contains(&d) {
        return Err(FormatError::UnsupportedDimension(d as u64));
    }
    if tokens.len() != 3 + d {
        return Err(bad(hl, "header needs d, n, h and d origin coordinates"));
    }
    let n: usize = tokens[1].parse().map_err(|_| bad(hl, "bad n"))?;
    let h: f64 = tokens[2].parse().map_err(|_| bad(hl, "bad h"))?;
    let mut origin = [0.0; MAX_DIM];
    for (a, t) in tokens[3..].iter().enumerate() {
        origin[a] = t.parse().map_err(|_| bad(hl, "bad origin"))?;
    }
    let spec = GridSpec::new(d, n, h, origin).map_err(grid_error)?;
    let values = lines
        .map(|(k, l)| l.trim().parse::<f64>().map_err(|_| bad(k, "not a number")))
        .collect::<Result<Vec<_>, _>>()?;
    if values.len() < spec.len() {
        return Err(FormatError::Truncated { needed: spec.len(), found: values.len() });
    }
    if values.len() > spec.len() {
        return Err(FormatError::TrailingBytes(values.len() - spec.len()));
    }
    Field::new(spec, values).map_err(grid_error)
}
