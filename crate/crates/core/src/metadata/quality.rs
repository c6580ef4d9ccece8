//! Encoder quality recovery from DQT tables against the IJG reference scaling.

use serde::Serialize;

use super::segments::{SegmentKind, SegmentTree};
use super::MetaError;

/// Annex K luminance table, natural (row-major) order.
pub const IJG_LUMA: [u16; 64] = [
    16, 11, 10, 16, 24, 40, 51, 61, //
    12, 12, 14, 19, 26, 58, 60, 55, //
    14, 13, 16, 24, 40, 57, 69, 56, //
    14, 17, 22, 29, 51, 87, 80, 62, //
    18, 22, 37, 56, 68, 109, 103, 77, //
    24, 35, 55, 64, 81, 104, 113, 92, //
    49, 64, 78, 87, 103, 121, 120, 101, //
    72, 92, 95, 98, 112, 100, 103, 99,
];

/// Annex K chrominance table, natural order.
pub const IJG_CHROMA: [u16; 64] = [
    17, 18, 24, 47, 99, 99, 99, 99, //
    18, 21, 26, 66, 99, 99, 99, 99, //
    24, 26, 56, 99, 99, 99, 99, 99, //
    47, 66, 99, 99, 99, 99, 99, 99, //
    99, 99, 99, 99, 99, 99, 99, 99, //
    99, 99, 99, 99, 99, 99, 99, 99, //
    99, 99, 99, 99, 99, 99, 99, 99, //
    99, 99, 99, 99, 99, 99, 99, 99,
];

/// Zigzag index -> natural index.
pub const ZIGZAG: [usize; 64] = [
    0, 1, 8, 16, 9, 2, 3, 10, 17, 24, 32, 25, 18, 11, 4, 5, 12, 19, 26, 33, 40, 48, 41, 34, 27,
    20, 13, 6, 7, 14, 21, 28, 35, 42, 49, 56, 57, 50, 43, 36, 29, 22, 15, 23, 30, 37, 44, 51, 58,
    59, 52, 45, 38, 31, 39, 46, 53, 60, 61, 54, 47, 55, 62, 63,
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Confidence {
    Exact,
    Approximate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct QualityEstimate {
    pub quality: u8,
    pub confidence: Confidence,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuantTable {
    pub id: u8,
    pub precision16: bool,
    /// Natural order.
    pub values: [u16; 64],
}

/// IJG percentage scaling: 5000/q below 50, 200 - 2q from 50 up.
pub fn ijg_scale(q: u8) -> u32 {
    let q = q.clamp(1, 100) as u32;
    if q < 50 {
        5000 / q
    } else {
        200 - 2 * q
    }
}

pub fn scaled_table(base: &[u16; 64], q: u8, max: u16) -> [u16; 64] {
    let s = ijg_scale(q);
    base.map(|v| ((v as u32 * s + 50) / 100).clamp(1, max as u32) as u16)
}

pub fn parse_dqt(payload: &[u8]) -> Result<Vec<QuantTable>, MetaError> {
    let mut out = Vec::new();
    let mut b = payload;
    while !b.is_empty() {
        let pq = b[0] >> 4;
        let id = b[0] & 0x0F;
        if pq > 1 || id > 3 {
            return Err(MetaError::BadQuantTable);
        }
        let width = if pq == 1 { 2 } else { 1 };
        let body = b.get(1..1 + 64 * width).ok_or(MetaError::BadQuantTable)?;
        let mut values = [0u16; 64];
        for (k, &nat) in ZIGZAG.iter().enumerate() {
            values[nat] = if pq == 1 {
                u16::from_be_bytes([body[2 * k], body[2 * k + 1]])
            } else {
                body[k] as u16
            };
        }
        out.push(QuantTable { id, precision16: pq == 1, values });
        b = &b[1 + 64 * width..];
    }
    Ok(out)
}

/// Later definitions of a table id replace earlier ones, as a decoder would see them
/// at the first scan.
pub fn quant_tables(tree: &SegmentTree) -> Result<Vec<QuantTable>, MetaError> {
    let mut tables: Vec<QuantTable> = Vec::new();
    let mut any = false;
    for seg in tree.iter_kind(SegmentKind::Dqt) {
        any = true;
        for t in parse_dqt(&seg.payload)? {
            match tables.iter_mut().find(|x| x.id == t.id) {
                Some(slot) => *slot = t,
                None => tables.push(t),
            }
        }
    }
    if !any || tables.is_empty() {
        return Err(MetaError::NoQuantTables);
    }
    tables.sort_by_key(|t| t.id);
    Ok(tables)
}

fn table_diff(t: &QuantTable, base: &[u16; 64], q: u8) -> u64 {
    let max = if t.precision16 { 32767 } else { 255 };
    let reference = scaled_table(base, q, max);
    t.values
        .iter()
        .zip(reference.iter())
        .map(|(&a, &b)| (a as i64 - b as i64).unsigned_abs())
        .sum()
}

/// Best IJG quality for the luma table (id 0, else the first table), with the
/// chroma table (id 1) added to the score when present.
pub fn estimate_from_tables(tables: &[QuantTable]) -> Result<QualityEstimate, MetaError> {
    let luma = tables
        .iter()
        .find(|t| t.id == 0)
        .or_else(|| tables.first())
        .ok_or(MetaError::NoQuantTables)?;
    let chroma = tables.iter().find(|t| t.id == 1 && t.id != luma.id);
    let mut best = (u64::MAX, 0u8);
    for q in 1..=100u8 {
        let mut d = table_diff(luma, &IJG_LUMA, q);
        if let Some(c) = chroma {
            d += table_diff(c, &IJG_CHROMA, q);
        }
        // Ties resolve toward the higher quality.
        if d <= best.0 {
            best = (d, q);
        }
    }
    Ok(QualityEstimate {
        quality: best.1,
        confidence: if best.0 == 0 { Confidence::Exact } else { Confidence::Approximate },
    })
}

pub fn estimate_quality(tree: &SegmentTree) -> Result<QualityEstimate, MetaError> {
    estimate_from_tables(&quant_tables(tree)?)
}
