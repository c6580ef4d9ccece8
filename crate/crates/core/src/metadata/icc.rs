//! ICC profile reassembly (APP2 chunks) and header/tag summary.

use serde::Serialize;

use super::MetaError;

pub const ICC_SIGNATURE: &[u8] = b"ICC_PROFILE\0";
const HEADER_LEN: usize = 128;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IccSummary {
    pub profile_size: u32,
    pub profile_cmm_type: String,
    pub version: String,
    pub device_class: String,
    pub color_space: String,
    pub connection_space: String,
    pub creation_datetime: String,
    pub file_signature: String,
    pub primary_platform: String,
    pub device_manufacturer: String,
    pub rendering_intent: String,
    pub illuminant: [f64; 3],
    pub creator: String,
    /// Empty when the profile carries no `desc` tag.
    pub description: String,
    pub copyright: Option<String>,
    pub white_point: Option<[f64; 3]>,
}

impl IccSummary {
    /// (label, value) pairs in listing order.
    pub fn listing(&self) -> Vec<(&'static str, String)> {
        let mut v = vec![
            ("Profile CMM Type", self.profile_cmm_type.clone()),
            ("Profile Version", self.version.clone()),
            ("Profile Class", self.device_class.clone()),
            ("Color Space Data", self.color_space.clone()),
            ("Profile Connection Space", self.connection_space.clone()),
            ("Profile Date Time", self.creation_datetime.clone()),
            ("Profile File Signature", self.file_signature.clone()),
            ("Primary Platform", self.primary_platform.clone()),
            ("Device Manufacturer", self.device_manufacturer.clone()),
            ("Rendering Intent", self.rendering_intent.clone()),
            ("Connection Space Illuminant", xyz_string(&self.illuminant)),
            ("Profile Creator", self.creator.clone()),
            ("Profile Description", self.description.clone()),
        ];
        if let Some(c) = &self.copyright {
            v.push(("Profile Copyright", c.clone()));
        }
        if let Some(w) = &self.white_point {
            v.push(("Media White Point", xyz_string(w)));
        }
        v
    }
}

fn trim_fixed(x: f64) -> String {
    let s = format!("{x:.5}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".to_string() } else { s.to_string() }
}

pub fn xyz_string(xyz: &[f64; 3]) -> String {
    xyz.iter().map(|&v| trim_fixed(v)).collect::<Vec<_>>().join(" ")
}

fn sig_str(b: &[u8]) -> String {
    String::from_utf8_lossy(b).trim_end_matches([' ', '\0']).to_string()
}

fn vendor_name(sig: &[u8]) -> String {
    match sig {
        b"ADBE" => "Adobe Systems Inc.".into(),
        b"APPL" | b"appl" => "Apple Computer Inc.".into(),
        b"MSFT" => "Microsoft Corporation".into(),
        b"SGI " => "Silicon Graphics Inc.".into(),
        b"SUNW" => "Sun Microsystems Inc.".into(),
        b"TGNT" => "Taligent, Inc.".into(),
        b"KODA" => "Kodak".into(),
        b"lcms" => "Little CMS".into(),
        b"HP  " => "Hewlett-Packard".into(),
        b"none" | [0, 0, 0, 0] => String::new(),
        other => sig_str(other),
    }
}

fn class_name(sig: &[u8]) -> String {
    match sig {
        b"scnr" => "Input Device Profile".into(),
        b"mntr" => "Display Device Profile".into(),
        b"prtr" => "Output Device Profile".into(),
        b"link" => "DeviceLink Profile".into(),
        b"spac" => "ColorSpace Conversion Profile".into(),
        b"abst" => "Abstract Profile".into(),
        b"nmcl" => "NamedColor Profile".into(),
        other => sig_str(other),
    }
}

fn intent_name(v: u32) -> String {
    match v {
        0 => "Perceptual".into(),
        1 => "Media-Relative Colorimetric".into(),
        2 => "Saturation".into(),
        3 => "ICC-Absolute Colorimetric".into(),
        n => format!("Unknown ({n})"),
    }
}

fn be16(b: &[u8], at: usize) -> Option<u16> {
    Some(u16::from_be_bytes(b.get(at..at.checked_add(2)?)?.try_into().ok()?))
}

fn be32(b: &[u8], at: usize) -> Option<u32> {
    Some(u32::from_be_bytes(b.get(at..at.checked_add(4)?)?.try_into().ok()?))
}

fn s15f16(b: &[u8], at: usize) -> Option<f64> {
    be32(b, at).map(|v| v as i32 as f64 / 65536.0)
}

fn xyz_at(b: &[u8], at: usize) -> Option<[f64; 3]> {
    Some([s15f16(b, at)?, s15f16(b, at + 4)?, s15f16(b, at + 8)?])
}

/// Concatenates `ICC_PROFILE` APP2 chunk payloads ordered by sequence number.
pub fn reassemble(chunks: &[&[u8]]) -> Result<Vec<u8>, MetaError> {
    let mut parts: Vec<(u8, u8, &[u8])> = Vec::with_capacity(chunks.len());
    for c in chunks {
        let rest = c.strip_prefix(ICC_SIGNATURE).ok_or(MetaError::MissingChunk)?;
        let [seq, count, data @ ..] = rest else {
            return Err(MetaError::MissingChunk);
        };
        parts.push((*seq, *count, data));
    }
    let count = parts.first().ok_or(MetaError::MissingChunk)?.1;
    if count == 0 || parts.len() != count as usize || parts.iter().any(|p| p.1 != count) {
        return Err(MetaError::MissingChunk);
    }
    parts.sort_by_key(|p| p.0);
    if parts.iter().enumerate().any(|(i, p)| p.0 as usize != i + 1) {
        return Err(MetaError::MissingChunk);
    }
    Ok(parts.iter().flat_map(|p| p.2.iter().copied()).collect())
}

/// Text of a `desc`, `mluc` or `text` tag body.
fn tag_text(tag: &[u8]) -> Option<String> {
    let cstr = |b: &[u8]| {
        let end = b.iter().position(|&c| c == 0).unwrap_or(b.len());
        String::from_utf8_lossy(&b[..end]).into_owned()
    };
    match tag.get(..4)? {
        b"desc" => {
            let n = be32(tag, 8)? as usize;
            let end = 12usize.checked_add(n)?.min(tag.len());
            Some(cstr(tag.get(12..end)?))
        }
        b"text" => Some(cstr(tag.get(8..)?)),
        b"mluc" => {
            if be32(tag, 8)? == 0 {
                return Some(String::new());
            }
            let len = be32(tag, 20)? as usize;
            let off = be32(tag, 24)? as usize;
            let raw = tag.get(off..off.checked_add(len)?)?;
            let units: Vec<u16> = raw.chunks_exact(2).map(|c| u16::from_be_bytes([c[0], c[1]])).collect();
            Some(String::from_utf16_lossy(&units).trim_end_matches('\0').to_string())
        }
        _ => None,
    }
}

pub fn parse_profile(profile: &[u8]) -> Result<IccSummary, MetaError> {
    if profile.len() < HEADER_LEN {
        return Err(MetaError::TruncatedProfile);
    }
    if &profile[36..40] != b"acsp" {
        return Err(MetaError::BadProfileSignature);
    }
    let h = profile;
    let u16_at = |at| be16(h, at).unwrap_or(0);
    let date = format!(
        "{:04}:{:02}:{:02} {:02}:{:02}:{:02}",
        u16_at(24),
        u16_at(26),
        u16_at(28),
        u16_at(30),
        u16_at(32),
        u16_at(34)
    );
    let declared = be32(h, 0).unwrap_or(0) as usize;
    let body = &profile[..declared.clamp(HEADER_LEN, profile.len())];

    let mut description = String::new();
    let mut copyright = None;
    let mut white_point = None;
    let tag_count = be32(body, HEADER_LEN).unwrap_or(0) as usize;
    for i in 0..tag_count.min(1024) {
        let e = HEADER_LEN + 4 + 12 * i;
        let (Some(sig), Some(off), Some(size)) = (body.get(e..e + 4), be32(body, e + 4), be32(body, e + 8)) else {
            break;
        };
        let (off, size) = (off as usize, size as usize);
        let Some(tag) = off.checked_add(size).and_then(|end| body.get(off..end)) else {
            continue;
        };
        match sig {
            b"desc" => description = tag_text(tag).unwrap_or_default(),
            b"cprt" => copyright = tag_text(tag),
            b"wtpt" if tag.starts_with(b"XYZ ") => white_point = xyz_at(tag, 8),
            _ => {}
        }
    }

    Ok(IccSummary {
        profile_size: declared as u32,
        profile_cmm_type: vendor_name(&h[4..8]),
        version: format!("{}.{}.{}", h[8], h[9] >> 4, h[9] & 0x0F),
        device_class: class_name(&h[12..16]),
        color_space: sig_str(&h[16..20]),
        connection_space: sig_str(&h[20..24]),
        creation_datetime: date,
        file_signature: "acsp".into(),
        primary_platform: vendor_name(&h[40..44]),
        device_manufacturer: vendor_name(&h[48..52]),
        rendering_intent: intent_name(be32(h, 64).unwrap_or(0) & 0xFFFF),
        illuminant: xyz_at(h, 68).unwrap_or([0.0; 3]),
        creator: vendor_name(&h[80..84]),
        description,
        copyright,
        white_point,
    })
}

/// Reassembles the APP2 chunks and summarizes the profile.
pub fn parse_icc(app2_chunks: &[&[u8]]) -> Result<IccSummary, MetaError> {
    parse_profile(&reassemble(app2_chunks)?)
}
