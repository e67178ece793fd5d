//! Puzzle and box files: versioned UTF-8 JSON documents, strict or lenient
//! about unknown fields, with typed read errors. These parsers accept
//! untrusted input; they validate shapes against the declared sizes before
//! doing anything size-dependent.

use std::collections::BTreeMap;
use std::path::Path;

use serde_json::{Map, Value};
use thiserror::Error;

use crate::puzzle::{Carving, Jig, JigSystem, Piece, PieceBox};

pub const FORMAT_VERSION: u64 = 1;

#[derive(Debug, Error)]
pub enum ReadError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("expected a JSON object at {context}")]
    NotAnObject { context: &'static str },

    #[error("missing field {field:?}")]
    MissingField { field: &'static str },

    #[error("field {field:?} has the wrong type or value")]
    BadField { field: &'static str },

    #[error("unknown field {field:?}")]
    UnknownField { field: String },

    #[error("unsupported format_version {found} (expected {FORMAT_VERSION})")]
    Version { found: u64 },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("{0}")]
    Domain(#[from] crate::error::Error),

    #[error("piece counts sum to {total}, expected {expected}")]
    CountMismatch { total: u64, expected: u64 },
}

pub type ReadResult<T> = std::result::Result<T, ReadError>;

/// Whether unknown fields are rejected or collected as warnings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReadMode {
    #[default]
    Strict,
    Lenient,
}

#[derive(Debug)]
pub struct LoadedPuzzle {
    pub carving: Carving,
    pub system: JigSystem,
    pub seed: Option<u64>,
    pub warnings: Vec<String>,
}

#[derive(Debug)]
pub struct LoadedBox {
    pub pieces: PieceBox,
    pub system: JigSystem,
    pub warnings: Vec<String>,
}

fn as_object<'v>(v: &'v Value, context: &'static str) -> ReadResult<&'v Map<String, Value>> {
    v.as_object().ok_or(ReadError::NotAnObject { context })
}

fn check_fields(
    obj: &Map<String, Value>,
    known: &[&str],
    mode: ReadMode,
    warnings: &mut Vec<String>,
) -> ReadResult<()> {
    for key in obj.keys() {
        if !known.contains(&key.as_str()) {
            match mode {
                ReadMode::Strict => {
                    return Err(ReadError::UnknownField { field: key.clone() });
                }
                ReadMode::Lenient => warnings.push(format!("ignoring unknown field {key:?}")),
            }
        }
    }
    Ok(())
}

fn get_u64(obj: &Map<String, Value>, field: &'static str) -> ReadResult<u64> {
    obj.get(field)
        .ok_or(ReadError::MissingField { field })?
        .as_u64()
        .ok_or(ReadError::BadField { field })
}

fn get_jig(v: &Value, field: &'static str) -> ReadResult<Jig> {
    let raw = v.as_u64().ok_or(ReadError::BadField { field })?;
    Jig::try_from(raw).map_err(|_| ReadError::BadField { field })
}

fn parse_system(obj: &Map<String, Value>) -> ReadResult<JigSystem> {
    let q64 = get_u64(obj, "q")?;
    let q = Jig::try_from(q64).map_err(|_| ReadError::BadField { field: "q" })?;
    let iota_raw = obj
        .get("iota")
        .ok_or(ReadError::MissingField { field: "iota" })?
        .as_array()
        .ok_or(ReadError::BadField { field: "iota" })?;
    if iota_raw.len() as u64 != q64 {
        return Err(ReadError::Shape(format!(
            "iota lists {} entries but q = {q64}",
            iota_raw.len()
        )));
    }
    let iota = iota_raw
        .iter()
        .map(|v| get_jig(v, "iota"))
        .collect::<ReadResult<Vec<Jig>>>()?;
    Ok(JigSystem::new(q, iota)?)
}

fn parse_matrix(
    obj: &Map<String, Value>,
    field: &'static str,
    rows: u64,
    cols: u64,
) -> ReadResult<Vec<Jig>> {
    let raw = obj
        .get(field)
        .ok_or(ReadError::MissingField { field })?
        .as_array()
        .ok_or(ReadError::BadField { field })?;
    if raw.len() as u64 != rows {
        return Err(ReadError::Shape(format!(
            "{field} has {} rows, expected {rows}",
            raw.len()
        )));
    }
    let mut flat = Vec::with_capacity(raw.len().saturating_mul(cols as usize));
    for (r, row) in raw.iter().enumerate() {
        let row = row.as_array().ok_or(ReadError::BadField { field })?;
        if row.len() as u64 != cols {
            return Err(ReadError::Shape(format!(
                "{field} row {r} has {} entries, expected {cols}",
                row.len()
            )));
        }
        for v in row {
            flat.push(get_jig(v, field)?);
        }
    }
    Ok(flat)
}

const PUZZLE_FIELDS: &[&str] = &["format_version", "n", "q", "iota", "north", "west", "seed"];

/// Parses a puzzle document.
pub fn parse_puzzle_json(text: &str, mode: ReadMode) -> ReadResult<LoadedPuzzle> {
    let value: Value = serde_json::from_str(text)?;
    let obj = as_object(&value, "top level")?;
    let mut warnings = Vec::new();
    check_fields(obj, PUZZLE_FIELDS, mode, &mut warnings)?;
    let version = get_u64(obj, "format_version")?;
    if version != FORMAT_VERSION {
        return Err(ReadError::Version { found: version });
    }
    let n64 = get_u64(obj, "n")?;
    if n64 == 0 {
        return Err(ReadError::BadField { field: "n" });
    }
    let rows = n64.checked_add(1).ok_or(ReadError::BadField { field: "n" })?;
    let system = parse_system(obj)?;
    let north = parse_matrix(obj, "north", rows, n64)?;
    let west = parse_matrix(obj, "west", n64, rows)?;
    // row counts above bound n by the document size, so this cast is safe
    let n = n64 as usize;
    let carving = Carving::from_flat(n, north, west, &system)?;
    let seed = match obj.get("seed") {
        None | Some(Value::Null) => None,
        Some(v) => Some(v.as_u64().ok_or(ReadError::BadField { field: "seed" })?),
    };
    Ok(LoadedPuzzle { carving, system, seed, warnings })
}

/// Serializes a carving with its jig system (and optional provenance seed).
pub fn puzzle_to_json(w: &Carving, sys: &JigSystem, seed: Option<u64>) -> String {
    let n = w.n();
    let north: Vec<Vec<Jig>> = (0..=n)
        .map(|r| (0..n).map(|c| w.north_at(r, c)).collect())
        .collect();
    let west: Vec<Vec<Jig>> = (0..n)
        .map(|r| (0..=n).map(|c| w.west_at(r, c)).collect())
        .collect();
    let mut doc = Map::new();
    doc.insert("format_version".into(), FORMAT_VERSION.into());
    doc.insert("n".into(), (n as u64).into());
    doc.insert("q".into(), sys.q().into());
    doc.insert("iota".into(), sys.iota_table().to_vec().into());
    doc.insert("north".into(), serde_json::to_value(north).unwrap());
    doc.insert("west".into(), serde_json::to_value(west).unwrap());
    if let Some(seed) = seed {
        doc.insert("seed".into(), seed.into());
    }
    serde_json::to_string_pretty(&Value::Object(doc)).unwrap()
}

pub fn write_puzzle(
    path: impl AsRef<Path>,
    w: &Carving,
    sys: &JigSystem,
    seed: Option<u64>,
) -> ReadResult<()> {
    std::fs::write(path, puzzle_to_json(w, sys, seed) + "\n")?;
    Ok(())
}

pub fn read_puzzle(path: impl AsRef<Path>, mode: ReadMode) -> ReadResult<LoadedPuzzle> {
    parse_puzzle_json(&std::fs::read_to_string(path)?, mode)
}

const BOX_FIELDS: &[&str] = &["format_version", "n", "q", "iota", "pieces"];
const BOX_ENTRY_FIELDS: &[&str] = &["piece", "count"];

/// Parses a box document.
pub fn parse_box_json(text: &str, mode: ReadMode) -> ReadResult<LoadedBox> {
    let value: Value = serde_json::from_str(text)?;
    let obj = as_object(&value, "top level")?;
    let mut warnings = Vec::new();
    check_fields(obj, BOX_FIELDS, mode, &mut warnings)?;
    let version = get_u64(obj, "format_version")?;
    if version != FORMAT_VERSION {
        return Err(ReadError::Version { found: version });
    }
    let n64 = get_u64(obj, "n")?;
    if n64 == 0 {
        return Err(ReadError::BadField { field: "n" });
    }
    let system = parse_system(obj)?;
    let entries = obj
        .get("pieces")
        .ok_or(ReadError::MissingField { field: "pieces" })?
        .as_array()
        .ok_or(ReadError::BadField { field: "pieces" })?;
    let mut counts: BTreeMap<Piece, u64> = BTreeMap::new();
    let mut total: u64 = 0;
    for entry in entries {
        let entry = as_object(entry, "pieces entry")?;
        check_fields(entry, BOX_ENTRY_FIELDS, mode, &mut warnings)?;
        let tuple = entry
            .get("piece")
            .ok_or(ReadError::MissingField { field: "piece" })?
            .as_array()
            .ok_or(ReadError::BadField { field: "piece" })?;
        if tuple.len() != 4 {
            return Err(ReadError::Shape(format!(
                "piece tuples have 4 sides, found {}",
                tuple.len()
            )));
        }
        let sides = tuple
            .iter()
            .map(|v| get_jig(v, "piece"))
            .collect::<ReadResult<Vec<Jig>>>()?;
        for &s in &sides {
            system.check(s)?;
        }
        let piece = Piece::new(sides[0], sides[1], sides[2], sides[3]);
        let canonical = piece.canonical();
        if canonical != piece {
            warnings.push(format!("normalized non-canonical piece {piece} to {canonical}"));
        }
        let count = get_u64(entry, "count")?;
        total = total
            .checked_add(count)
            .ok_or(ReadError::BadField { field: "count" })?;
        *counts.entry(canonical).or_insert(0) += count;
    }
    let expected = n64
        .checked_mul(n64)
        .ok_or(ReadError::BadField { field: "n" })?;
    if total != expected {
        return Err(ReadError::CountMismatch { total, expected });
    }
    counts.retain(|_, &mut c| c > 0);
    let pieces = PieceBox::from_counts(n64 as usize, counts)?;
    Ok(LoadedBox { pieces, system, warnings })
}

pub fn box_to_json(box_: &PieceBox, sys: &JigSystem) -> String {
    let entries: Vec<Value> = box_
        .counts()
        .iter()
        .map(|(p, &count)| {
            let mut entry = Map::new();
            entry.insert("piece".into(), serde_json::to_value(p.sides().to_vec()).unwrap());
            entry.insert("count".into(), count.into());
            Value::Object(entry)
        })
        .collect();
    let mut doc = Map::new();
    doc.insert("format_version".into(), FORMAT_VERSION.into());
    doc.insert("n".into(), (box_.n() as u64).into());
    doc.insert("q".into(), sys.q().into());
    doc.insert("iota".into(), sys.iota_table().to_vec().into());
    doc.insert("pieces".into(), Value::Array(entries));
    serde_json::to_string_pretty(&Value::Object(doc)).unwrap()
}

pub fn write_box(path: impl AsRef<Path>, box_: &PieceBox, sys: &JigSystem) -> ReadResult<()> {
    std::fs::write(path, box_to_json(box_, sys) + "\n")?;
    Ok(())
}

pub fn read_box(path: impl AsRef<Path>, mode: ReadMode) -> ReadResult<LoadedBox> {
    parse_box_json(&std::fs::read_to_string(path)?, mode)
}
