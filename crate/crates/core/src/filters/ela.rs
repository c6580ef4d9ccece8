//! Error level analysis.

use jpeg_encoder::{ChromaSubsamplingMethod, ColorType, Encoder, SamplingFactor};
use serde_json::json;

use super::{check_range, par_rows, FilterError};
use crate::map::{percentile_nearest_rank, AnalysisMap, MapKind};
use crate::raster::{load_image, RasterImage};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ElaParams {
    pub quality: u8,
    pub scale: u8,
    pub contrast: u8,
}

impl Default for ElaParams {
    fn default() -> Self {
        Self { quality: 75, scale: 50, contrast: 20 }
    }
}

impl ElaParams {
    pub fn validate(&self) -> Result<(), FilterError> {
        check_range("quality", self.quality as i64, 1, 100)?;
        check_range("scale", self.scale as i64, 0, 100)?;
        check_range("contrast", self.contrast as i64, 0, 100)
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({ "quality": self.quality, "scale": self.scale, "contrast": self.contrast })
    }
}

/// Baseline JPEG with Annex K tables scaled to `quality`, 4:2:0 chroma
/// (box-averaged), no metadata segments beyond JFIF.
pub fn encode_jpeg(img: &RasterImage, quality: u8) -> Result<Vec<u8>, FilterError> {
    let (w, h) = (img.width(), img.height());
    if w > u16::MAX as u32 || h > u16::MAX as u32 {
        return Err(FilterError::EncodeFailure(format!("{w}x{h} exceeds JPEG limits")));
    }
    let mut out = Vec::new();
    let mut enc = Encoder::new(&mut out, quality.clamp(1, 100));
    enc.set_sampling_factor(SamplingFactor::R_4_2_0);
    enc.set_chroma_subsampling_method(ChromaSubsamplingMethod::Average);
    enc.encode(img.as_rgb_bytes(), w as u16, h as u16, ColorType::Rgb)
        .map_err(|e| FilterError::EncodeFailure(e.to_string()))?;
    Ok(out)
}

pub fn ela_map(img: &RasterImage, p: &ElaParams) -> Result<AnalysisMap, FilterError> {
    p.validate()?;
    let jpeg = encode_jpeg(img, p.quality)?;
    let re = load_image(&jpeg).map_err(|e| FilterError::EncodeFailure(e.to_string()))?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    let gain = p.scale as f64 / 10.0;
    let (src, dst) = (img.as_rgb_bytes(), re.as_rgb_bytes());
    let amplified: Vec<f64> = par_rows(w, h, 3, |y, row| {
        let base = y * w * 3;
        for (i, v) in row.iter_mut().enumerate() {
            let d = (src[base + i] as f64 - dst[base + i] as f64).abs() / 255.0;
            *v = (d * gain).clamp(0.0, 1.0);
        }
    });

    let mut nonzero: Vec<f64> = amplified.iter().copied().filter(|&v| v > 0.0).collect();
    let values = if nonzero.is_empty() {
        amplified
    } else {
        nonzero.sort_by(f64::total_cmp);
        let clip = percentile_nearest_rank(&nonzero, 100.0 - p.contrast as f64);
        amplified.into_iter().map(|v| (v / clip).min(1.0)).collect()
    };
    Ok(AnalysisMap::new(img.width(), img.height(), 3, values, MapKind::Ela, p.to_json()))
}
