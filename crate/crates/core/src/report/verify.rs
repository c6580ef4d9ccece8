//! Recomputes every hash in a report directory.

use std::fs;
use std::path::{Component, Path};

use super::pipeline::audit_jsonl;
use super::{
    audit_chain, io_err, parse_report, render_report, report_digest, RenderFormat, ReportError, ANNOTATIONS_FILE,
    AUDIT_FILE, HTML_FILE, MAPS_DIR, REPORT_FILE,
};
use crate::hash::compute_hash;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyOutcome {
    /// Number of files whose hashes were checked.
    pub files_checked: usize,
    pub audit_entries: usize,
}

fn safe_relative(rel: &str) -> bool {
    let p = Path::new(rel);
    p.starts_with(MAPS_DIR) && p.components().all(|c| matches!(c, Component::Normal(_)))
}

/// Fails with every problem found, not just the first.
pub fn verify_report_dir(dir: &Path) -> Result<VerifyOutcome, ReportError> {
    let report_path = dir.join(REPORT_FILE);
    let bytes = fs::read(&report_path).map_err(|e| io_err(&report_path, e))?;
    let r = parse_report(&bytes).map_err(|e| ReportError::Verification(vec![format!("{REPORT_FILE}: {e}")]))?;
    let mut problems = Vec::new();
    let mut files = 1;

    if render_report(&r, RenderFormat::Json) != bytes {
        problems.push(format!("{REPORT_FILE}: not in canonical form"));
    }
    match &r.digest {
        Some(d) if *d == report_digest(&r) => {}
        Some(_) => problems.push(format!("{REPORT_FILE}: digest does not match contents")),
        None => problems.push(format!("{REPORT_FILE}: digest missing")),
    }

    let expected = audit_chain(&r.image, &r.analyses, r.metrology.as_ref(), |i| {
        r.audit.get(i).map(|e| e.timestamp.clone()).unwrap_or_default()
    });
    if expected != r.audit {
        problems.push(format!("{REPORT_FILE}: audit chain does not match recorded artifacts"));
    }
    match fs::read(dir.join(AUDIT_FILE)) {
        Ok(a) => {
            files += 1;
            if a != audit_jsonl(&r) {
                problems.push(format!("{AUDIT_FILE}: differs from the report's audit chain"));
            }
        }
        Err(e) => problems.push(format!("{AUDIT_FILE}: {e}")),
    }

    for a in &r.analyses {
        if !safe_relative(&a.map_reference) {
            problems.push(format!("{}: map reference outside {MAPS_DIR}/", a.map_reference));
            continue;
        }
        match fs::read(dir.join(&a.map_reference)) {
            Ok(png) => {
                files += 1;
                let found = compute_hash(&png);
                if found != a.map_hash {
                    problems.push(format!("{}: hash {found} does not match {}", a.map_reference, a.map_hash));
                }
            }
            Err(e) => problems.push(format!("{}: {e}", a.map_reference)),
        }
    }

    let ann_path = dir.join(ANNOTATIONS_FILE);
    match (&r.metrology, fs::read(&ann_path)) {
        (Some(m), Ok(a)) => {
            files += 1;
            let found = compute_hash(&a);
            if found != m.annotations_hash {
                problems.push(format!("{ANNOTATIONS_FILE}: hash {found} does not match {}", m.annotations_hash));
            }
        }
        (Some(_), Err(e)) => problems.push(format!("{ANNOTATIONS_FILE}: {e}")),
        (None, Ok(_)) => problems.push(format!("{ANNOTATIONS_FILE}: present but the report has no metrology")),
        (None, Err(_)) => {}
    }

    if let Ok(html) = fs::read(dir.join(HTML_FILE)) {
        files += 1;
        if html != render_report(&r, RenderFormat::Html) {
            problems.push(format!("{HTML_FILE}: does not match a fresh rendering of {REPORT_FILE}"));
        }
    }

    if problems.is_empty() {
        Ok(VerifyOutcome { files_checked: files, audit_entries: r.audit.len() })
    } else {
        Err(ReportError::Verification(problems))
    }
}
