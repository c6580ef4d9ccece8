//! Static HTML view of a report. Maps are linked by their relative paths so the
//! page works from inside the report directory.

use std::fmt::Write;

use serde_json::Value;

use super::{AnalysisRecord, ForensicReport};
use crate::map::MapKind;

pub fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            c => out.push(c),
        }
    }
    out
}

fn param(p: &Value, key: &str) -> String {
    match p.get(key) {
        Some(Value::String(s)) => s.clone(),
        Some(v) => v.to_string(),
        None => "?".into(),
    }
}

/// Figure caption: analysis name followed by its parameter settings.
pub fn caption(a: &AnalysisRecord) -> String {
    let p = &a.params;
    match a.kind {
        MapKind::Ela => format!(
            "Error level analysis: quality {}%, scale {}%, contrast {}%.",
            param(p, "quality"),
            param(p, "scale"),
            param(p, "contrast")
        ),
        MapKind::PcaProjection | MapKind::PcaDistance => format!(
            "Principal component analysis: component {}, {} map.",
            param(p, "component"),
            param(p, "mode")
        ),
        MapKind::Lga => format!(
            "Luminance gradient: intensity {}%, {} channel, {}.",
            param(p, "intensity"),
            param(p, "channel"),
            if p.get("normalized") == Some(&Value::Bool(true)) { "normalized" } else { "raw gain" }
        ),
        MapKind::Noise => format!(
            "Noise residual: median radius {}, gain {}.",
            param(p, "radius"),
            param(p, "gain")
        ),
    }
}

fn fmt_num(v: &Value) -> String {
    match v {
        Value::Number(n) => n.to_string(),
        Value::Null => "n/a".into(),
        other => other.to_string(),
    }
}

fn metrology_section(out: &mut String, result: &Value) {
    out.push_str("<section><h2>Metrology</h2>\n");
    if let Some(heights) = result.get("heights").and_then(Value::as_array) {
        out.push_str("<table><tr><th>Target</th><th>Height (cm)</th><th>Interval (cm)</th></tr>\n");
        for h in heights {
            let iv = h.get("interval_cm").and_then(Value::as_array).cloned().unwrap_or_default();
            let _ = writeln!(
                out,
                "<tr><td>{}</td><td>{}</td><td>{} to {}</td></tr>",
                escape(h.get("target_id").and_then(Value::as_str).unwrap_or("")),
                fmt_num(h.get("height_cm").unwrap_or(&Value::Null)),
                fmt_num(iv.first().unwrap_or(&Value::Null)),
                fmt_num(iv.get(1).unwrap_or(&Value::Null)),
            );
        }
        out.push_str("</table>\n");
    }
    if let Some(vps) = result.get("vanishing_points").and_then(Value::as_object) {
        out.push_str("<table><tr><th>Axis</th><th>Point (homogeneous)</th><th>RMS residual</th><th>Support</th></tr>\n");
        for (axis, vp) in vps {
            let _ = writeln!(
                out,
                "<tr><td>{}</td><td>{}</td><td>{}</td><td>{}</td></tr>",
                escape(axis),
                escape(&vp.get("point").map(|p| p.to_string()).unwrap_or_default()),
                fmt_num(vp.get("rms_residual").unwrap_or(&Value::Null)),
                fmt_num(vp.get("support").unwrap_or(&Value::Null)),
            );
        }
        out.push_str("</table>\n");
    }
    if let Some(t) = result.get("tilt").filter(|t| !t.is_null()) {
        let _ = writeln!(
            out,
            "<p>Tilt: left/right {}, top/bottom {}, verdict {}.</p>",
            fmt_num(t.get("lr_ratio").unwrap_or(&Value::Null)),
            fmt_num(t.get("tb_ratio").unwrap_or(&Value::Null)),
            escape(t.get("verdict").and_then(Value::as_str).unwrap_or("")),
        );
    }
    if let Some(d) = result.get("distortion").and_then(Value::as_object) {
        for (chain, p) in d {
            let _ = writeln!(
                out,
                "<p>Straightness chain {}: max sagitta {} px, normalized {}, {}.</p>",
                escape(chain),
                fmt_num(p.get("max_sagitta_px").unwrap_or(&Value::Null)),
                fmt_num(p.get("normalized_sagitta").unwrap_or(&Value::Null)),
                escape(p.get("sign").and_then(Value::as_str).unwrap_or("")),
            );
        }
    }
    if let Some(errs) = result.get("errors").and_then(Value::as_array).filter(|e| !e.is_empty()) {
        out.push_str("<ul class=\"errors\">\n");
        for e in errs {
            let _ = writeln!(
                out,
                "<li>{}: {} ({})</li>",
                escape(e.get("stage").and_then(Value::as_str).unwrap_or("")),
                escape(e.get("code").and_then(Value::as_str).unwrap_or("")),
                escape(e.get("message").and_then(Value::as_str).unwrap_or("")),
            );
        }
        out.push_str("</ul>\n");
    }
    if let Some(p) = result.get("uncertainty_policy").and_then(Value::as_str) {
        let _ = writeln!(out, "<p class=\"policy\">Uncertainty: {}</p>", escape(p));
    }
    out.push_str("</section>\n");
}

pub fn render_html(r: &ForensicReport) -> String {
    let mut out = String::new();
    out.push_str("<!DOCTYPE html>\n<html lang=\"en\"><head><meta charset=\"utf-8\">\n");
    let _ = writeln!(out, "<title>printproof report {}</title>", &r.image.hash.to_hex()[..12]);
    out.push_str(
        "<style>body{font-family:sans-serif;max-width:960px;margin:auto}\
figure{display:inline-block;margin:1em;max-width:440px}\
figure img{max-width:100%;image-rendering:pixelated}\
figcaption{font-size:.9em;font-style:italic}\
td,th{padding:2px 8px;text-align:left}code{font-size:.85em}</style>\n</head><body>\n",
    );
    let _ = writeln!(out, "<h1>Forensic report</h1>\n<p>Image SHA-256 <code>{}</code>, {} x {} px, {}.</p>",
        r.image.hash, r.image.width, r.image.height, serde_json::to_value(r.image.format).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default());
    if let Some(d) = &r.digest {
        let _ = writeln!(out, "<p>Report digest <code>{d}</code></p>");
    }

    if !r.caveats.is_empty() {
        out.push_str("<section><h2>Caveats</h2><ul>\n");
        for c in &r.caveats {
            let _ = writeln!(out, "<li>{}</li>", escape(c));
        }
        out.push_str("</ul></section>\n");
    }

    if !r.image.listing.is_empty() {
        out.push_str("<section><h2>Metadata</h2><table>\n");
        for (k, v) in &r.image.listing {
            let _ = writeln!(out, "<tr><th>{}</th><td>{}</td></tr>", escape(k), escape(v));
        }
        out.push_str("</table></section>\n");
    }

    if !r.analyses.is_empty() {
        out.push_str("<section><h2>Analyses</h2>\n");
        for a in &r.analyses {
            let s = &a.summary_stats;
            let _ = writeln!(
                out,
                "<figure><img src=\"{}\" alt=\"{}\"><figcaption>{} Mean {}, p95 {}, max {}.</figcaption></figure>",
                escape(&a.map_reference),
                a.kind.as_str(),
                escape(&caption(a)),
                s.mean,
                s.p95,
                s.max
            );
        }
        out.push_str("</section>\n");
    }

    if let Some(m) = &r.metrology {
        metrology_section(&mut out, &m.result);
    }

    if !r.external_attachments.is_empty() {
        out.push_str("<section><h2>External attachments</h2><ul>\n");
        for a in &r.external_attachments {
            let _ = writeln!(out, "<li>{} <code>{}</code></li>", escape(&a.label), a.file_hash);
        }
        out.push_str("</ul></section>\n");
    }

    out.push_str("<section><h2>Audit trail</h2><table>\n<tr><th>#</th><th>Time</th><th>Operation</th><th>Input</th><th>Output</th></tr>\n");
    for e in &r.audit {
        let _ = writeln!(
            out,
            "<tr><td>{}</td><td>{}</td><td>{}</td><td><code>{}</code></td><td><code>{}</code></td></tr>",
            e.seq,
            escape(&e.timestamp),
            escape(&e.operation),
            &e.input_hash.to_hex()[..16],
            &e.output_hash.to_hex()[..16]
        );
    }
    out.push_str("</table></section>\n</body></html>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn escapes_markup() {
        assert_eq!(escape("<a href=\"x\">&'"), "&lt;a href=&quot;x&quot;&gt;&amp;&#39;");
    }
}
