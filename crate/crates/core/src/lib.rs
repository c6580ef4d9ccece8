//! Forensic image analysis toolkit.
//!
//! The crate covers JPEG container metadata ([`metadata`]), pixel-statistical
//! tamper maps ([`filters`]), single-view geometry ([`metrology`]), and a
//! hash-anchored audit report ([`report`]). The `printproof` binary exposes all
//! of it on the command line ([`cli`]) and over HTTP ([`server`]).

#![forbid(unsafe_code)]

pub mod canonical;
pub mod cli;
pub mod filters;
pub mod hash;
pub mod map;
pub mod metadata;
pub mod metrology;
pub mod raster;
pub mod report;
pub mod server;

pub use hash::{compute_hash, ContentHash};
pub use map::{normalize_map, AnalysisMap, MapKind, NormalizeMode};
pub use raster::{extract_channel, load_image, Channel, CoreError, Plane, RasterImage, SourceFormat};
