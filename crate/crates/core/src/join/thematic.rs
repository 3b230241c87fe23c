//! Thematic point layers loaded from CSV.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geo::GeoPoint;

/// A single CSV cell after type inference.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum AttrValue {
    Number(f64),
    Text(String),
    Missing,
}

impl AttrValue {
    pub fn as_number(&self) -> Option<f64> {
        match self {
            AttrValue::Number(n) => Some(*n),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThematicPoint {
    /// 0-based data row ordinal in the source file.
    pub id: usize,
    pub position: GeoPoint,
    pub attributes: BTreeMap<String, AttrValue>,
}

impl ThematicPoint {
    pub fn number(&self, column: &str) -> Option<f64> {
        self.attributes.get(column).and_then(AttrValue::as_number)
    }
}

#[derive(Debug, Clone)]
pub struct ThematicLayer {
    pub points: Vec<ThematicPoint>,
    /// Attribute columns in header order (coordinate columns excluded).
    pub columns: Vec<String>,
    pub numeric_columns: BTreeSet<String>,
    pub source_path: String,
}

impl ThematicLayer {
    pub fn has_column(&self, name: &str) -> bool {
        self.columns.iter().any(|c| c == name)
    }

    /// Numeric values of `column`, indexed like `points`.
    pub fn numeric_values(&self, column: &str) -> Vec<Option<f64>> {
        self.points.iter().map(|p| p.number(column)).collect()
    }
}

/// A loaded layer plus the number of rows that were dropped.
#[derive(Debug, Clone)]
pub struct ThematicLoad {
    pub layer: ThematicLayer,
    pub dropped_rows: usize,
    pub warnings: Vec<String>,
}

pub fn load_thematic(path: &Path, lat_column: &str, lon_column: &str) -> Result<ThematicLoad> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    parse_thematic(&text, &path.display().to_string(), lat_column, lon_column)
}

/// Parse CSV text (RFC 4180, header row required, empty cell = missing).
///
/// A column is numeric when every non-empty cell parses as a finite number
/// and at least one cell is non-empty.
pub fn parse_thematic(
    text: &str,
    source_name: &str,
    lat_column: &str,
    lon_column: &str,
) -> Result<ThematicLoad> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| Error::data(source_name, format!("cannot read header row: {e}")))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::data(source_name, format!("missing coordinate column `{name}`")))
    };
    let (lat_idx, lon_idx) = (find(lat_column)?, find(lon_column)?);
    let attr_idx: Vec<usize> = (0..headers.len()).filter(|&i| i != lat_idx && i != lon_idx).collect();

    let mut rows: Vec<(usize, GeoPoint, Vec<String>)> = Vec::new();
    let mut dropped = 0;
    for (ordinal, record) in reader.records().enumerate() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(ordinal + 2, |p| p.line() as usize);
            Error::data(source_name, format!("row {} (line {line}): {e}", ordinal + 1))
        })?;
        let coord = |i: usize| record.get(i).and_then(|s| s.trim().parse::<f64>().ok());
        match (coord(lat_idx), coord(lon_idx)) {
            (Some(lat), Some(lon)) => match GeoPoint::new(lat, lon) {
                Ok(p) => rows.push((
                    ordinal,
                    p,
                    attr_idx.iter().map(|&i| record.get(i).unwrap_or("").trim().to_string()).collect(),
                )),
                Err(_) => dropped += 1,
            },
            _ => dropped += 1,
        }
    }
    if rows.is_empty() {
        return Err(Error::data(source_name, "no rows with valid coordinates"));
    }

    let columns: Vec<String> = attr_idx.iter().map(|&i| headers[i].clone()).collect();
    let numeric: Vec<bool> = (0..columns.len())
        .map(|c| {
            let mut any = false;
            let all = rows.iter().all(|(_, _, cells)| {
                let s = &cells[c];
                if s.is_empty() {
                    return true;
                }
                any = true;
                s.parse::<f64>().is_ok_and(f64::is_finite)
            });
            all && any
        })
        .collect();

    let points = rows
        .into_iter()
        .map(|(id, position, cells)| {
            let attributes = columns
                .iter()
                .zip(cells)
                .enumerate()
                .map(|(c, (name, cell))| {
                    let v = if cell.is_empty() {
                        AttrValue::Missing
                    } else if numeric[c] {
                        AttrValue::Number(cell.parse().expect("checked numeric"))
                    } else {
                        AttrValue::Text(cell)
                    };
                    (name.clone(), v)
                })
                .collect();
            ThematicPoint { id, position, attributes }
        })
        .collect();

    let mut warnings = Vec::new();
    if dropped > 0 {
        let noun = if dropped == 1 { "row" } else { "rows" };
        warnings.push(format!("{dropped} {noun} dropped: coordinate out of range"));
    }
    let numeric_columns = columns
        .iter()
        .zip(&numeric)
        .filter(|(_, &n)| n)
        .map(|(c, _)| c.clone())
        .collect();
    Ok(ThematicLoad {
        layer: ThematicLayer { points, columns, numeric_columns, source_path: source_name.to_string() },
        dropped_rows: dropped,
        warnings,
    })
}
