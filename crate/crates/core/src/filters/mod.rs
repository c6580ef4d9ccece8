//! Pixel-statistical tamper maps: ELA, PCA, LGA and noise residuals.
//!
//! Every filter is a pure function of (image, params) and returns an
//! [`AnalysisMap`](crate::map::AnalysisMap) with values in [0,1].

use thiserror::Error;

pub mod ela;
pub mod lga;
pub mod noise;
pub mod pca;

pub use ela::{ela_map, encode_jpeg, ElaParams};
pub use lga::{lga_map, sobel_gradients, LgaParams};
pub use noise::{median_filter, noise_map, NoiseParams};
pub use pca::{pca_basis, pca_map, PcaBasis, PcaMode};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FilterError {
    #[error("JPEG re-encode failed: {0}")]
    EncodeFailure(String),
    #[error("image is {width}x{height}; at least 3x3 required")]
    ImageTooSmall { width: u32, height: u32 },
    #[error("invalid value for {field}: {reason}")]
    InvalidParam { field: &'static str, reason: String },
}

impl FilterError {
    pub fn code(&self) -> &'static str {
        match self {
            Self::EncodeFailure(_) => "ENCODE_FAILURE",
            Self::ImageTooSmall { .. } => "IMAGE_TOO_SMALL",
            Self::InvalidParam { .. } => "BAD_FLAG",
        }
    }
}

pub fn check_range(field: &'static str, v: i64, lo: i64, hi: i64) -> Result<(), FilterError> {
    if (lo..=hi).contains(&v) {
        Ok(())
    } else {
        Err(FilterError::InvalidParam {
            field,
            reason: format!("{v} outside {lo}..={hi}"),
        })
    }
}

/// Same-size map over rows in parallel; the closure sees one output row.
pub(crate) fn par_rows<T: Send + Default + Clone>(
    width: usize,
    height: usize,
    per_pixel: usize,
    f: impl Fn(usize, &mut [T]) + Sync + Send,
) -> Vec<T> {
    use rayon::prelude::*;
    let mut out = vec![T::default(); width * height * per_pixel];
    out.par_chunks_mut(width * per_pixel)
        .enumerate()
        .for_each(|(y, row)| f(y, row));
    out
}

/// Caveat attached to ELA and noise maps computed from a reproduction or
/// a non-JPEG source.
pub const PRINT_REPRODUCTION_CAVEAT: &str =
    "ELA and noise maps are unreliable on photographed or scanned prints: the reproduction step re-quantizes and re-noises every pixel, masking earlier compression and sensor traces.";

pub const PNG_ELA_CAVEAT: &str = "recompression baseline absent";
