//! Hash-anchored forensic report: aggregation, rendering, on-disk layout and
//! verification.
//!
//! `report.json` is the source of truth. Its `digest` field is the SHA-256 of
//! the canonical report with `digest` set to null, and every audit entry
//! carries the hash of the previous `audit.jsonl` line.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::canonical::{canonicalize, round_sig, to_canonical_bytes};
use crate::hash::{compute_hash, ContentHash};
use crate::map::{AnalysisMap, MapKind, SummaryStats};
use crate::raster::SourceFormat;

pub mod html;
pub mod pipeline;
pub mod verify;

pub use pipeline::{run_report, write_report_dir, ReportBundle, ReportConfig};
pub use verify::{verify_report_dir, VerifyOutcome};

pub const FORMAT_VERSION: u32 = 1;
pub const REPORT_FILE: &str = "report.json";
pub const AUDIT_FILE: &str = "audit.jsonl";
pub const ANNOTATIONS_FILE: &str = "annotations.json";
pub const HTML_FILE: &str = "report.html";
pub const MAPS_DIR: &str = "maps";
/// Timestamp used when `--fixed-time` is given without a value.
pub const DEFAULT_FIXED_TIME: &str = "1970-01-01T00:00:00Z";

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("hash mismatch in {what}: expected {expected}, found {found}")]
    HashMismatch { what: String, expected: ContentHash, found: ContentHash },
    #[error(transparent)]
    Decode(#[from] crate::raster::CoreError),
    #[error(transparent)]
    Filter(#[from] crate::filters::FilterError),
    #[error("annotations are not valid JSON for the schema: {0}")]
    BadAnnotations(String),
    #[error("annotations violate {} invariant(s): {}", .0.len(), .0.iter().map(|v| format!("{}: {}", v.field, v.message)).collect::<Vec<_>>().join("; "))]
    InvalidAnnotations(Vec<crate::metrology::Violation>),
    #[error("{0}")]
    Io(String),
    #[error("verification failed: {}", .0.join("; "))]
    Verification(Vec<String>),
}

impl ReportError {
    pub fn code(&self) -> &'static str {
        match self {
            Self::HashMismatch { .. } => "HASH_MISMATCH",
            Self::Decode(e) => e.code(),
            Self::Filter(e) => e.code(),
            Self::BadAnnotations(_) => "BAD_ANNOTATIONS",
            Self::InvalidAnnotations(_) => "INVALID_ANNOTATIONS",
            Self::Io(_) => "IO",
            Self::Verification(_) => "VERIFY_FAILED",
        }
    }
}

pub(crate) fn io_err(path: &std::path::Path, e: std::io::Error) -> ReportError {
    ReportError::Io(format!("{}: {e}", path.display()))
}

/// Source of audit timestamps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Clock {
    System,
    Fixed(String),
}

impl Clock {
    pub fn now(&self) -> String {
        match self {
            Self::System => chrono::Utc::now().format("%Y-%m-%dT%H:%M:%S%.3fZ").to_string(),
            Self::Fixed(t) => t.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImageRecord {
    pub hash: ContentHash,
    pub pixel_hash: ContentHash,
    pub format: SourceFormat,
    pub width: u32,
    pub height: u32,
    /// Metadata summary JSON; null for non-JPEG input.
    pub metadata: Value,
    /// Human-readable (label, value) rows.
    pub listing: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisRecord {
    pub image_hash: ContentHash,
    pub kind: MapKind,
    pub params: Value,
    pub params_digest: ContentHash,
    /// Path relative to the report directory.
    pub map_reference: String,
    pub map_hash: ContentHash,
    pub summary_stats: SummaryStats,
}

impl AnalysisRecord {
    /// Record plus PNG bytes for a map computed from the image `image_hash`.
    pub fn from_map(image_hash: &ContentHash, map: &AnalysisMap) -> (Self, Vec<u8>) {
        let png = map.to_png();
        let s = map.stats();
        let record = Self {
            image_hash: image_hash.clone(),
            kind: map.kind,
            params: map.params.clone(),
            params_digest: map.params_digest.clone(),
            map_reference: map_file_name(map.kind, &map.params_digest),
            map_hash: compute_hash(&png),
            summary_stats: SummaryStats { mean: round_sig(s.mean), p95: round_sig(s.p95), max: round_sig(s.max) },
        };
        (record, png)
    }
}

pub fn map_file_name(kind: MapKind, digest: &ContentHash) -> String {
    format!("{MAPS_DIR}/{}-{}.png", kind.as_str(), &digest.to_hex()[..16])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetrologyRecord {
    pub annotations_hash: ContentHash,
    pub params_digest: ContentHash,
    pub result: Value,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attachment {
    pub label: String,
    pub file_hash: ContentHash,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditEntry {
    pub seq: u32,
    pub timestamp: String,
    pub operation: String,
    pub params_digest: ContentHash,
    pub input_hash: ContentHash,
    pub output_hash: ContentHash,
    /// Hash of the previous `audit.jsonl` line; the first entry links to the empty string.
    pub prev: ContentHash,
}

impl AuditEntry {
    pub fn line(&self) -> Vec<u8> {
        to_canonical_bytes(self).expect("audit entries serialize")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForensicReport {
    pub format_version: u32,
    pub image: ImageRecord,
    pub analyses: Vec<AnalysisRecord>,
    pub metrology: Option<MetrologyRecord>,
    pub caveats: Vec<String>,
    pub external_attachments: Vec<Attachment>,
    pub audit: Vec<AuditEntry>,
    pub digest: Option<ContentHash>,
}

fn value_hash(v: &Value) -> ContentHash {
    compute_hash(&to_canonical_bytes(v).expect("JSON values serialize"))
}

fn empty_params() -> ContentHash {
    value_hash(&json!({}))
}

/// The audit chain implied by a report's contents, stamped with `times`.
pub(crate) fn audit_chain(
    image: &ImageRecord,
    analyses: &[AnalysisRecord],
    metrology: Option<&MetrologyRecord>,
    mut times: impl FnMut(usize) -> String,
) -> Vec<AuditEntry> {
    let mut steps = vec![
        ("load".to_string(), empty_params(), image.hash.clone(), image.pixel_hash.clone()),
        ("summarize".to_string(), empty_params(), image.hash.clone(), value_hash(&image.metadata)),
    ];
    for a in analyses {
        steps.push((format!("analysis:{}", a.kind.as_str()), a.params_digest.clone(), image.hash.clone(), a.map_hash.clone()));
    }
    if let Some(m) = metrology {
        steps.push(("metrology".to_string(), m.params_digest.clone(), m.annotations_hash.clone(), value_hash(&m.result)));
    }
    let mut prev = compute_hash(b"");
    steps
        .into_iter()
        .enumerate()
        .map(|(i, (operation, params_digest, input_hash, output_hash))| {
            let e = AuditEntry { seq: i as u32, timestamp: times(i), operation, params_digest, input_hash, output_hash, prev: prev.clone() };
            prev = compute_hash(&e.line());
            e
        })
        .collect()
}

/// Aggregates per-image results into a sealed report.
pub fn build_report(
    image: ImageRecord,
    analyses: Vec<AnalysisRecord>,
    metrology: Option<MetrologyRecord>,
    caveats: Vec<String>,
    external_attachments: Vec<Attachment>,
    clock: &Clock,
) -> Result<ForensicReport, ReportError> {
    for a in &analyses {
        if a.image_hash != image.hash {
            return Err(ReportError::HashMismatch {
                what: format!("analysis {}", a.kind.as_str()),
                expected: image.hash.clone(),
                found: a.image_hash.clone(),
            });
        }
    }
    let mut metrology = metrology;
    if let Some(m) = &mut metrology {
        if let Some(found) = m.result.get("image_hash").and_then(Value::as_str).and_then(ContentHash::parse) {
            if found != image.hash {
                return Err(ReportError::HashMismatch { what: "metrology".into(), expected: image.hash.clone(), found });
            }
        }
        m.result = canonicalize(std::mem::take(&mut m.result));
    }
    let mut image = image;
    image.metadata = canonicalize(std::mem::take(&mut image.metadata));
    let audit = audit_chain(&image, &analyses, metrology.as_ref(), |_| clock.now());
    let mut r = ForensicReport {
        format_version: FORMAT_VERSION,
        image,
        analyses,
        metrology,
        caveats,
        external_attachments,
        audit,
        digest: None,
    };
    r.digest = Some(report_digest(&r));
    Ok(r)
}

/// SHA-256 of the canonical report with `digest` nulled.
pub fn report_digest(r: &ForensicReport) -> ContentHash {
    let mut unsealed = r.clone();
    unsealed.digest = None;
    compute_hash(&to_canonical_bytes(&unsealed).expect("reports serialize"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RenderFormat {
    Json,
    Html,
}

pub fn render_report(r: &ForensicReport, format: RenderFormat) -> Vec<u8> {
    match format {
        RenderFormat::Json => to_canonical_bytes(r).expect("reports serialize"),
        RenderFormat::Html => html::render_html(r).into_bytes(),
    }
}

pub fn parse_report(bytes: &[u8]) -> Result<ForensicReport, serde_json::Error> {
    serde_json::from_slice(bytes)
}
