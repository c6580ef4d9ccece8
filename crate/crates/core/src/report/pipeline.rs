//! End-to-end report generation and the on-disk directory layout.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde_json::{json, Value};

use super::{
    build_report, io_err, render_report, AnalysisRecord, Attachment, Clock, ForensicReport, ImageRecord,
    MetrologyRecord, RenderFormat, ReportError, ANNOTATIONS_FILE, AUDIT_FILE, HTML_FILE, MAPS_DIR, REPORT_FILE,
};
use crate::filters::{
    ela_map, lga_map, noise_map, pca_basis, pca_map, ElaParams, LgaParams, NoiseParams, PcaMode,
    PNG_ELA_CAVEAT, PRINT_REPRODUCTION_CAVEAT,
};
use crate::hash::compute_hash;
use crate::metadata::summarize;
use crate::metrology::{run_metrology, AnnotationSet, MetrologyOptions};
use crate::raster::{load_image, SourceFormat};

#[derive(Clone, Debug, PartialEq)]
pub struct ReportConfig {
    pub ela: Option<ElaParams>,
    /// (component, mode) pairs.
    pub pca: Vec<(u8, PcaMode)>,
    pub lga: Option<LgaParams>,
    pub noise: Option<NoiseParams>,
    pub metrology: MetrologyOptions,
    pub clock: Clock,
    pub attachments: Vec<Attachment>,
}

impl Default for ReportConfig {
    fn default() -> Self {
        Self {
            ela: Some(ElaParams::default()),
            pca: vec![(1, PcaMode::Projection), (1, PcaMode::Distance)],
            lga: Some(LgaParams::default()),
            noise: Some(NoiseParams::default()),
            metrology: MetrologyOptions::default(),
            clock: Clock::System,
            attachments: Vec::new(),
        }
    }
}

/// A report and the artifact bytes it references.
#[derive(Clone, Debug, PartialEq)]
pub struct ReportBundle {
    pub report: ForensicReport,
    /// Relative path → PNG bytes.
    pub maps: BTreeMap<String, Vec<u8>>,
    pub annotations: Option<Vec<u8>>,
}

pub fn metrology_params(opts: &MetrologyOptions) -> Value {
    json!({ "seed": opts.seed, "perturbation_px": opts.perturbation_px, "tilt_tau": opts.tilt_tau })
}

/// Parses, hash-checks and runs annotations against an image.
pub fn metrology_record(
    image_hash: &crate::hash::ContentHash,
    size: (u32, u32),
    annotations: &[u8],
    opts: &MetrologyOptions,
) -> Result<MetrologyRecord, ReportError> {
    let ann = AnnotationSet::from_json(annotations).map_err(|e| ReportError::BadAnnotations(e.to_string()))?;
    if &ann.image_hash != image_hash {
        return Err(ReportError::HashMismatch {
            what: "annotations".into(),
            expected: image_hash.clone(),
            found: ann.image_hash,
        });
    }
    let result = run_metrology(&ann, size, opts).map_err(ReportError::InvalidAnnotations)?;
    let params = crate::canonical::canonicalize(metrology_params(opts));
    Ok(MetrologyRecord {
        annotations_hash: compute_hash(annotations),
        params_digest: compute_hash(&crate::canonical::to_canonical_bytes(&params).expect("serializable")),
        result: result.to_json(),
    })
}

/// Runs every configured analysis on `bytes` and assembles the report.
pub fn run_report(bytes: &[u8], annotations: Option<&[u8]>, cfg: &ReportConfig) -> Result<ReportBundle, ReportError> {
    let img = load_image(bytes)?;
    let hash = img.source_hash().clone();
    let summary = match img.source_format() {
        SourceFormat::Jpeg => summarize(bytes).ok(),
        SourceFormat::Png => None,
    };
    let image = ImageRecord {
        hash: hash.clone(),
        pixel_hash: img.pixel_hash(),
        format: img.source_format(),
        width: img.width(),
        height: img.height(),
        metadata: summary.as_ref().map_or(Value::Null, |s| s.to_json()),
        listing: summary.as_ref().map(|s| s.rows()).unwrap_or_default(),
    };

    let mut maps = Vec::new();
    if let Some(p) = &cfg.ela {
        maps.push(ela_map(&img, p)?);
    }
    if !cfg.pca.is_empty() {
        let basis = pca_basis(&img);
        for &(component, mode) in &cfg.pca {
            maps.push(pca_map(&img, &basis, component, mode)?);
        }
    }
    if let Some(p) = &cfg.lga {
        maps.push(lga_map(&img, p)?);
    }
    if let Some(p) = &cfg.noise {
        maps.push(noise_map(&img, p)?);
    }
    let mut analyses = Vec::new();
    let mut files = BTreeMap::new();
    for m in &maps {
        let (rec, png) = AnalysisRecord::from_map(&hash, m);
        if files.insert(rec.map_reference.clone(), png).is_none() {
            analyses.push(rec);
        }
    }

    let metrology = annotations
        .map(|a| metrology_record(&hash, (img.width(), img.height()), a, &cfg.metrology))
        .transpose()?;

    let mut caveats = Vec::new();
    let residual_maps = cfg.ela.is_some() || cfg.noise.is_some();
    if residual_maps && img.source_format() != SourceFormat::Jpeg {
        caveats.push(format!("{PNG_ELA_CAVEAT}: ELA and noise maps were computed from non-JPEG input"));
    }
    if residual_maps {
        caveats.push(PRINT_REPRODUCTION_CAVEAT.to_string());
    }
    if let Some(s) = &summary {
        if s.truncated {
            caveats.push("JPEG stream is truncated; metadata may be incomplete".into());
        }
    }

    let report = build_report(image, analyses, metrology, caveats, cfg.attachments.clone(), &cfg.clock)?;
    Ok(ReportBundle { report, maps: files, annotations: annotations.map(<[u8]>::to_vec) })
}

/// Writes `bytes` to a temporary sibling and renames it into place.
pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), ReportError> {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = path.with_file_name(format!(".{name}.tmp{}", std::process::id()));
    fs::write(&tmp, bytes).map_err(|e| io_err(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| io_err(path, e))
}

pub fn audit_jsonl(r: &ForensicReport) -> Vec<u8> {
    let mut out = Vec::new();
    for e in &r.audit {
        out.extend_from_slice(&e.line());
        out.push(b'\n');
    }
    out
}

/// Lays out report.json, audit.jsonl, maps/*.png, annotations.json and
/// optionally report.html under `dir`.
pub fn write_report_dir(bundle: &ReportBundle, dir: &Path, html: bool) -> Result<(), ReportError> {
    fs::create_dir_all(dir.join(MAPS_DIR)).map_err(|e| io_err(dir, e))?;
    for (rel, png) in &bundle.maps {
        write_atomic(&dir.join(rel), png)?;
    }
    if let Some(a) = &bundle.annotations {
        write_atomic(&dir.join(ANNOTATIONS_FILE), a)?;
    }
    write_atomic(&dir.join(AUDIT_FILE), &audit_jsonl(&bundle.report))?;
    if html {
        write_atomic(&dir.join(HTML_FILE), &render_report(&bundle.report, RenderFormat::Html))?;
    }
    write_atomic(&dir.join(REPORT_FILE), &render_report(&bundle.report, RenderFormat::Json))
}
