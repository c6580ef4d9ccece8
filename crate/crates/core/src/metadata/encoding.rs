//! Frame header (SOFn) decoding: coding process, precision, sampling factors.

use serde::Serialize;

use super::segments::SegmentTree;
use super::MetaError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FrameComponent {
    pub id: u8,
    pub h: u8,
    pub v: u8,
    pub quant_table: u8,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FrameHeader {
    pub marker: u8,
    pub precision: u8,
    pub width: u16,
    pub height: u16,
    pub components: Vec<FrameComponent>,
}

impl FrameHeader {
    pub fn parse(marker: u8, payload: &[u8]) -> Result<Self, MetaError> {
        if payload.len() < 6 {
            return Err(MetaError::BadFrameHeader);
        }
        let n = payload[5] as usize;
        if n == 0 || payload.len() < 6 + 3 * n {
            return Err(MetaError::BadFrameHeader);
        }
        let components = payload[6..6 + 3 * n]
            .chunks_exact(3)
            .map(|c| FrameComponent {
                id: c[0],
                h: c[1] >> 4,
                v: c[1] & 0x0F,
                quant_table: c[2],
            })
            .collect();
        Ok(Self {
            marker,
            precision: payload[0],
            height: u16::from_be_bytes([payload[1], payload[2]]),
            width: u16::from_be_bytes([payload[3], payload[4]]),
            components,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EncodingInfo {
    pub encoding_process: String,
    /// `None` for single-component (grayscale) frames.
    pub subsampling: Option<String>,
    pub bits: u8,
    pub components: u8,
    pub width: u16,
    pub height: u16,
}

pub fn coding_process_name(marker: u8) -> &'static str {
    match marker {
        0xC0 => "Baseline DCT, Huffman coding",
        0xC1 => "Extended sequential DCT, Huffman coding",
        0xC2 => "Progressive DCT, Huffman coding",
        0xC3 => "Lossless, Huffman coding",
        0xC5 => "Sequential DCT, differential Huffman coding",
        0xC6 => "Progressive DCT, differential Huffman coding",
        0xC7 => "Lossless, Differential Huffman coding",
        0xC9 => "Extended sequential DCT, arithmetic coding",
        0xCA => "Progressive DCT, arithmetic coding",
        0xCB => "Lossless, arithmetic coding",
        0xCD => "Sequential DCT, differential arithmetic coding",
        0xCE => "Progressive DCT, differential arithmetic coding",
        0xCF => "Lossless, differential arithmetic coding",
        _ => "Unknown",
    }
}

/// `YCbCr4:2:0 (2 2)` style label from the luma factors relative to chroma.
pub fn subsampling_label(frame: &FrameHeader) -> Option<String> {
    if frame.components.len() != 3 {
        return None;
    }
    let (y, cb, cr) = (&frame.components[0], &frame.components[1], &frame.components[2]);
    let raw = || format!("Unknown ({} {})", y.h, y.v);
    if (cb.h, cb.v) != (cr.h, cr.v) || cb.h == 0 || cb.v == 0 {
        return Some(raw());
    }
    if y.h % cb.h != 0 || y.v % cb.v != 0 {
        return Some(raw());
    }
    let (h, v) = (y.h / cb.h, y.v / cb.v);
    let ratio = match (h, v) {
        (1, 1) => "4:4:4",
        (1, 2) => "4:4:0",
        (1, 4) => "4:4:1",
        (2, 1) => "4:2:2",
        (2, 2) => "4:2:0",
        (2, 4) => "4:2:1",
        (4, 1) => "4:1:1",
        (4, 2) => "4:1:0",
        _ => return Some(raw()),
    };
    Some(format!("YCbCr{ratio} ({h} {v})"))
}

pub fn frame_header(tree: &SegmentTree) -> Result<FrameHeader, MetaError> {
    let mut frames = tree.frame_headers();
    let first = frames.next().ok_or(MetaError::NoFrameHeader)?;
    if frames.next().is_some() {
        return Err(MetaError::MultipleFrameHeaders);
    }
    FrameHeader::parse(first.marker, &first.payload)
}

pub fn detect_encoding(tree: &SegmentTree) -> Result<EncodingInfo, MetaError> {
    let frame = frame_header(tree)?;
    Ok(EncodingInfo {
        encoding_process: coding_process_name(frame.marker).to_string(),
        subsampling: subsampling_label(&frame),
        bits: frame.precision,
        components: frame.components.len() as u8,
        width: frame.width,
        height: frame.height,
    })
}
