//! Flattened metadata listing composed from every container parser.

use serde::Serialize;
use serde_json::{json, Value};

use super::encoding::{detect_encoding, EncodingInfo};
use super::exif::{parse_exif, resolution_unit_name, ExifData, EXIF_SIGNATURE};
use super::icc::{parse_icc, IccSummary, ICC_SIGNATURE};
use super::iptc::{parse_iptc, IptcData, PHOTOSHOP_SIGNATURE};
use super::quality::{estimate_quality, QualityEstimate};
use super::segments::{parse_segments, SegmentInfo, SegmentKind, SegmentTree};
use super::{MetaError, MetaWarning};
use crate::hash::{compute_hash, ContentHash};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JfifInfo {
    pub version: String,
    pub resolution_unit: String,
    pub x_resolution: u16,
    pub y_resolution: u16,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetadataSummary {
    pub file_size: usize,
    pub file_hash: ContentHash,
    pub mime: &'static str,
    pub jfif: Option<JfifInfo>,
    pub encoding: Option<EncodingInfo>,
    pub comment: Option<String>,
    pub exif: Option<ExifData>,
    pub iptc: IptcData,
    pub icc: Option<IccSummary>,
    pub dqt: Option<QualityEstimate>,
    pub segments: Vec<SegmentInfo>,
    pub truncated: bool,
    pub warnings: Vec<MetaWarning>,
}

/// `round(w*h / 1e6, 3)`, rounded half up in integer arithmetic.
pub fn megapixels(width: u32, height: u32) -> f64 {
    let px = width as u64 * height as u64;
    ((px + 500) / 1000) as f64 / 1000.0
}

fn latin1_or_utf8(raw: &[u8]) -> String {
    let raw = match raw.iter().rposition(|&b| b != 0) {
        Some(end) => &raw[..=end],
        None => &[],
    };
    match std::str::from_utf8(raw) {
        Ok(s) => s.to_string(),
        Err(_) => raw.iter().map(|&b| b as char).collect(),
    }
}

fn parse_jfif(payload: &[u8]) -> Option<JfifInfo> {
    let p = payload.strip_prefix(b"JFIF\0")?;
    if p.len() < 7 {
        return None;
    }
    Some(JfifInfo {
        version: format!("{}.{:02}", p[0], p[1]),
        resolution_unit: resolution_unit_name(p[2] as u32 + 1).to_string(),
        x_resolution: u16::from_be_bytes([p[3], p[4]]),
        y_resolution: u16::from_be_bytes([p[5], p[6]]),
    })
}

fn warn(warnings: &mut Vec<MetaWarning>, context: &'static str, e: MetaError) {
    warnings.push(MetaWarning::Parser { code: e.code(), context });
}

impl MetadataSummary {
    pub fn from_tree(bytes: &[u8], tree: &SegmentTree) -> Self {
        let mut warnings = Vec::new();
        if tree.truncated {
            warnings.push(MetaWarning::TruncatedStream);
        }

        let jfif = tree.iter_kind(SegmentKind::App(0)).find_map(|s| parse_jfif(&s.payload));

        let encoding = detect_encoding(tree).map_err(|e| warn(&mut warnings, "sof", e)).ok();

        let comments: Vec<String> = tree.iter_kind(SegmentKind::Com).map(|s| latin1_or_utf8(&s.payload)).collect();
        let comment = (!comments.is_empty()).then(|| comments.join("\n"));

        let exif = tree
            .iter_kind(SegmentKind::App(1))
            .find(|s| s.payload.starts_with(EXIF_SIGNATURE))
            .and_then(|s| match parse_exif(&s.payload) {
                Ok(d) => {
                    warnings.extend(d.warnings.iter().cloned());
                    Some(d)
                }
                Err(e) => {
                    warn(&mut warnings, "exif", e);
                    None
                }
            });

        let mut iptc = IptcData::default();
        for s in tree.iter_kind(SegmentKind::App(13)) {
            if s.payload.starts_with(PHOTOSHOP_SIGNATURE) {
                let d = parse_iptc(&s.payload);
                iptc.records.extend(d.records);
                if d.digest.is_some() {
                    iptc.digest = d.digest;
                }
            }
        }

        let chunks: Vec<&[u8]> = tree
            .iter_kind(SegmentKind::App(2))
            .filter(|s| s.payload.starts_with(ICC_SIGNATURE))
            .map(|s| s.payload.as_slice())
            .collect();
        let icc = if chunks.is_empty() {
            None
        } else {
            parse_icc(&chunks).map_err(|e| warn(&mut warnings, "icc", e)).ok()
        };

        let dqt = estimate_quality(tree).map_err(|e| warn(&mut warnings, "dqt", e)).ok();

        Self {
            file_size: bytes.len(),
            file_hash: compute_hash(bytes),
            mime: "image/jpeg",
            jfif,
            encoding,
            comment,
            exif,
            iptc,
            icc,
            dqt,
            segments: tree.listing(),
            truncated: tree.truncated,
            warnings,
        }
    }

    pub fn image_size(&self) -> Option<String> {
        self.encoding.as_ref().map(|e| format!("{}x{}", e.width, e.height))
    }

    pub fn megapixels(&self) -> Option<f64> {
        self.encoding.as_ref().map(|e| megapixels(e.width as u32, e.height as u32))
    }

    pub fn to_json(&self) -> Value {
        let sof = self.encoding.as_ref().map(|e| {
            json!({
                "encoding_process": e.encoding_process,
                "subsampling": e.subsampling,
                "bits_per_sample": e.bits,
                "color_components": e.components,
                "width": e.width,
                "height": e.height,
                "image_size": self.image_size(),
                "megapixels": self.megapixels(),
            })
        });
        json!({
            "file": { "size": self.file_size, "hash": self.file_hash, "mime": self.mime },
            "jfif": self.jfif,
            "sof": sof,
            "exif": self.exif.as_ref().map(|x| x.entries.iter().map(|e| e.to_json()).collect::<Vec<_>>()).unwrap_or_default(),
            "iptc": self.iptc.to_json(),
            "iptc_digest": self.iptc.digest.as_ref().map(hex::encode),
            "icc": self.icc,
            "dqt": self.dqt,
            "comment": self.comment,
            "image_size": self.image_size(),
            "megapixels": self.megapixels(),
            "segments": self.segments,
            "truncated": self.truncated,
            "warnings": self.warnings.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
        })
    }

    /// (label, value) rows in listing order.
    pub fn rows(&self) -> Vec<(String, String)> {
        let mut rows: Vec<(String, String)> = Vec::new();
        let mut push = |k: &str, v: String| rows.push((k.to_string(), v));
        push("File Size", format!("{} bytes", self.file_size));
        push("File SHA-256", self.file_hash.to_hex());
        push("MIME Type", self.mime.to_string());
        if let Some(j) = &self.jfif {
            push("JFIF Version", j.version.clone());
            push("Resolution Unit", j.resolution_unit.clone());
            push("X Resolution", j.x_resolution.to_string());
            push("Y Resolution", j.y_resolution.to_string());
        }
        if let Some(x) = &self.exif {
            for e in &x.entries {
                push(&e.label(), e.display());
            }
        }
        for r in &self.iptc.records {
            push(&r.label(), r.value.clone());
        }
        if let Some(d) = &self.iptc.digest {
            push("Current IPTC Digest", hex::encode(d));
        }
        if let Some(icc) = &self.icc {
            for (k, v) in icc.listing() {
                push(k, v);
            }
        }
        if let Some(c) = &self.comment {
            push("Comment", c.clone());
        }
        if let Some(e) = &self.encoding {
            push("Image Width", e.width.to_string());
            push("Image Height", e.height.to_string());
            push("Encoding Process", e.encoding_process.clone());
            push("Bits Per Sample", e.bits.to_string());
            push("Color Components", e.components.to_string());
            if let Some(s) = &e.subsampling {
                push("Y Cb Cr Sub Sampling", s.clone());
            }
        }
        if let Some(q) = &self.dqt {
            let c = match q.confidence {
                super::quality::Confidence::Exact => "exact",
                super::quality::Confidence::Approximate => "approximate",
            };
            push("JPEG Quality Estimate", format!("{} ({c})", q.quality));
        }
        if let (Some(size), Some(mp)) = (self.image_size(), self.megapixels()) {
            push("Image Size", size);
            push("Megapixels", format!("{mp:.3}"));
        }
        for w in &self.warnings {
            push("Warning", w.to_string());
        }
        rows
    }

    /// `Label<pad to 32>: value`, one field per line.
    pub fn listing(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.rows() {
            out.push_str(&format!("{k:<32}: {v}\n"));
        }
        out
    }
}

/// Composes every parser. Only a missing SOI is fatal; other parser failures
/// become warnings on the returned summary.
pub fn summarize(bytes: &[u8]) -> Result<MetadataSummary, MetaError> {
    let tree = parse_segments(bytes)?;
    Ok(MetadataSummary::from_tree(bytes, &tree))
}
