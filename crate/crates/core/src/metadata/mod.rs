//! JPEG container parsing: marker segments, EXIF, IPTC-IIM, ICC and DQT.

use serde::Serialize;
use thiserror::Error;

pub mod encoding;
pub mod exif;
pub mod icc;
pub mod iptc;
pub mod quality;
pub mod segments;
pub mod summary;

pub use encoding::{detect_encoding, EncodingInfo, FrameHeader};
pub use exif::{parse_exif, ExifData, ExifEntry, ExifValue, Ifd};
pub use icc::{parse_icc, IccSummary};
pub use iptc::{parse_iptc, IptcData, IptcRecord};
pub use quality::{estimate_quality, Confidence, QualityEstimate};
pub use segments::{parse_segments, Segment, SegmentKind, SegmentTree};
pub use summary::{summarize, MetadataSummary};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum MetaError {
    #[error("stream does not start with SOI")]
    NotAJpeg,
    #[error("no SOF frame header")]
    NoFrameHeader,
    #[error("more than one SOF frame header")]
    MultipleFrameHeaders,
    #[error("malformed SOF frame header")]
    BadFrameHeader,
    #[error("malformed TIFF header in EXIF payload")]
    BadTiffHeader,
    #[error("ICC profile chunks missing or inconsistent")]
    MissingChunk,
    #[error("ICC profile lacks the acsp signature")]
    BadProfileSignature,
    #[error("ICC profile shorter than its header")]
    TruncatedProfile,
    #[error("no DQT segment")]
    NoQuantTables,
    #[error("malformed DQT segment")]
    BadQuantTable,
}

impl MetaError {
    pub fn code(&self) -> &'static str {
        match self {
            Self::NotAJpeg => "NOT_A_JPEG",
            Self::NoFrameHeader => "NO_FRAME_HEADER",
            Self::MultipleFrameHeaders => "MULTIPLE_FRAME_HEADERS",
            Self::BadFrameHeader => "BAD_FRAME_HEADER",
            Self::BadTiffHeader => "BAD_TIFF_HEADER",
            Self::MissingChunk => "MISSING_CHUNK",
            Self::BadProfileSignature => "BAD_PROFILE_SIGNATURE",
            Self::TruncatedProfile => "TRUNCATED_PROFILE",
            Self::NoQuantTables => "NO_QUANT_TABLES",
            Self::BadQuantTable => "BAD_QUANT_TABLE",
        }
    }
}

/// Non-fatal findings attached to a partial parse.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "warning", rename_all = "snake_case")]
pub enum MetaWarning {
    IfdOffsetOutOfBounds { ifd: Ifd, offset: usize },
    EntryOffsetOutOfBounds { ifd: Ifd, tag: u16 },
    IfdLoop { offset: usize },
    TruncatedStream,
    Parser { code: &'static str, context: &'static str },
}

impl std::fmt::Display for MetaWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::IfdOffsetOutOfBounds { ifd, offset } => {
                write!(f, "IfdOffsetOutOfBounds: {ifd:?} at {offset}")
            }
            Self::EntryOffsetOutOfBounds { ifd, tag } => {
                write!(f, "EntryOffsetOutOfBounds: {ifd:?} tag 0x{tag:04X}")
            }
            Self::IfdLoop { offset } => write!(f, "IfdLoop: {offset}"),
            Self::TruncatedStream => write!(f, "TruncatedStream"),
            Self::Parser { code, context } => write!(f, "{context}: {code}"),
        }
    }
}
