//! JPEG marker stream walker.
//!
//! Every input byte ends up in exactly one place (a segment's prefix, its
//! payload, its entropy-coded tail, or the tree's trailing bytes), so
//! [`SegmentTree::to_bytes`] reproduces the input exactly.

use serde::Serialize;

use super::MetaError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SegmentKind {
    Soi,
    App(u8),
    Dqt,
    Sof0,
    Sof2,
    Dht,
    Sos,
    Com,
    Eoi,
    Other,
}

impl SegmentKind {
    pub fn from_marker(marker: u8) -> Self {
        match marker {
            0xD8 => Self::Soi,
            0xE0..=0xEF => Self::App(marker - 0xE0),
            0xDB => Self::Dqt,
            0xC0 => Self::Sof0,
            0xC2 => Self::Sof2,
            0xC4 => Self::Dht,
            0xDA => Self::Sos,
            0xFE => Self::Com,
            0xD9 => Self::Eoi,
            _ => Self::Other,
        }
    }

    pub fn name(self) -> String {
        match self {
            Self::Soi => "SOI".into(),
            Self::App(n) => format!("APP{n}"),
            Self::Dqt => "DQT".into(),
            Self::Sof0 => "SOF0".into(),
            Self::Sof2 => "SOF2".into(),
            Self::Dht => "DHT".into(),
            Self::Sos => "SOS".into(),
            Self::Com => "COM".into(),
            Self::Eoi => "EOI".into(),
            Self::Other => "other".into(),
        }
    }
}

/// Markers without a length field.
fn is_standalone(marker: u8) -> bool {
    matches!(marker, 0x01 | 0xD0..=0xD9)
}

/// Start-of-frame markers (C0..CF minus DHT, JPG and DAC).
pub fn is_frame_header(marker: u8) -> bool {
    matches!(marker, 0xC0..=0xCF) && !matches!(marker, 0xC4 | 0xC8 | 0xCC)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    /// Second marker byte (the first is always 0xFF).
    pub marker: u8,
    /// Byte index of the marker's 0xFF.
    pub offset: usize,
    /// Payload bytes, excluding the two-byte length field.
    pub length: usize,
    pub kind: SegmentKind,
    /// Bytes between the previous segment and this marker (fill 0xFF, stray data).
    pub prefix: Vec<u8>,
    pub payload: Vec<u8>,
    /// Entropy-coded data following an SOS header.
    pub entropy: Vec<u8>,
}

impl Segment {
    pub fn has_length_field(&self) -> bool {
        !is_standalone(self.marker)
    }

    pub fn marker_code(&self) -> u16 {
        0xFF00 | self.marker as u16
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SegmentTree {
    pub segments: Vec<Segment>,
    /// Set when the stream ends before EOI or inside a segment.
    pub truncated: bool,
    /// Bytes after EOI, or the unparseable remainder of a truncated stream.
    pub trailing: Vec<u8>,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct SegmentInfo {
    pub marker: String,
    pub kind: String,
    pub offset: usize,
    pub length: usize,
}

impl SegmentTree {
    pub fn iter_kind(&self, kind: SegmentKind) -> impl Iterator<Item = &Segment> {
        self.segments.iter().filter(move |s| s.kind == kind)
    }

    pub fn frame_headers(&self) -> impl Iterator<Item = &Segment> {
        self.segments.iter().filter(|s| is_frame_header(s.marker))
    }

    /// Re-serializes the tree; length fields are recomputed from payload sizes.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        for s in &self.segments {
            out.extend_from_slice(&s.prefix);
            out.extend_from_slice(&[0xFF, s.marker]);
            if s.has_length_field() {
                let len = (s.payload.len() + 2) as u16;
                out.extend_from_slice(&len.to_be_bytes());
                out.extend_from_slice(&s.payload);
            }
            out.extend_from_slice(&s.entropy);
        }
        out.extend_from_slice(&self.trailing);
        out
    }

    pub fn listing(&self) -> Vec<SegmentInfo> {
        self.segments
            .iter()
            .map(|s| SegmentInfo {
                marker: format!("0x{:04X}", s.marker_code()),
                kind: s.kind.name(),
                offset: s.offset,
                length: s.length,
            })
            .collect()
    }
}

/// End of the entropy-coded run starting at `pos`: the index of the first 0xFF
/// that begins a real marker (possibly preceded by fill bytes).
fn entropy_end(bytes: &[u8], mut pos: usize) -> usize {
    while pos < bytes.len() {
        if bytes[pos] != 0xFF {
            pos += 1;
            continue;
        }
        let mut run_end = pos;
        while run_end < bytes.len() && bytes[run_end] == 0xFF {
            run_end += 1;
        }
        match bytes.get(run_end) {
            None => return bytes.len(),
            Some(0x00) | Some(0xD0..=0xD7) => pos = run_end + 1,
            Some(_) => return pos,
        }
    }
    bytes.len()
}

/// Position of the next marker's 0xFF at or after `pos`, skipping fill bytes.
fn next_marker(bytes: &[u8], mut pos: usize) -> Option<usize> {
    while pos + 1 < bytes.len() {
        if bytes[pos] == 0xFF && bytes[pos + 1] != 0xFF && bytes[pos + 1] != 0x00 {
            return Some(pos);
        }
        pos += 1;
    }
    None
}

pub fn parse_segments(bytes: &[u8]) -> Result<SegmentTree, MetaError> {
    if !bytes.starts_with(&[0xFF, 0xD8]) {
        return Err(MetaError::NotAJpeg);
    }
    let mut tree = SegmentTree::default();
    let mut pos = 0usize;
    let mut saw_eoi = false;

    while pos < bytes.len() {
        let Some(at) = next_marker(bytes, pos) else {
            tree.trailing = bytes[pos..].to_vec();
            break;
        };
        let marker = bytes[at + 1];
        let prefix = bytes[pos..at].to_vec();
        let mut seg = Segment {
            marker,
            offset: at,
            length: 0,
            kind: SegmentKind::from_marker(marker),
            prefix,
            payload: Vec::new(),
            entropy: Vec::new(),
        };
        let mut end = at + 2;
        if !is_standalone(marker) {
            if at + 4 > bytes.len() {
                tree.truncated = true;
                tree.trailing = bytes[pos..].to_vec();
                return Ok(tree);
            }
            let size = u16::from_be_bytes([bytes[at + 2], bytes[at + 3]]) as usize;
            if size < 2 || at + 2 + size > bytes.len() {
                tree.truncated = true;
                tree.trailing = bytes[pos..].to_vec();
                return Ok(tree);
            }
            seg.length = size - 2;
            seg.payload = bytes[at + 4..at + 2 + size].to_vec();
            end = at + 2 + size;
        }
        if seg.kind == SegmentKind::Sos {
            let stop = entropy_end(bytes, end);
            seg.entropy = bytes[end..stop].to_vec();
            end = stop;
        }
        tree.segments.push(seg);
        pos = end;
        if marker == 0xD9 {
            saw_eoi = true;
            tree.trailing = bytes[pos..].to_vec();
            break;
        }
    }
    tree.truncated |= !saw_eoi;
    Ok(tree)
}
