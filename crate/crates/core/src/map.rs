//! Normalized analysis maps and their PNG serialization.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::canonical::to_canonical_bytes;
use crate::hash::{compute_hash, ContentHash};
use crate::raster::CoreError;

/// tEXt keyword under which map PNGs carry their generating parameters.
pub const PNG_PARAMS_KEYWORD: &str = "printproof:params";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapKind {
    Ela,
    PcaProjection,
    PcaDistance,
    Lga,
    Noise,
}

impl MapKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Ela => "ela",
            Self::PcaProjection => "pca_projection",
            Self::PcaDistance => "pca_distance",
            Self::Lga => "lga",
            Self::Noise => "noise",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NormalizeMode {
    GlobalMax,
    /// Clip at the p-th percentile (nearest rank) of absolute values.
    Percentile(f64),
}

/// Nearest-rank percentile: the value at rank `ceil(p/100 * n)` of the sorted input.
pub fn percentile_nearest_rank(sorted: &[f64], p: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let n = sorted.len();
    let rank = ((p / 100.0) * n as f64).ceil() as usize;
    sorted[rank.clamp(1, n) - 1]
}

fn sorted_abs(values: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = values.iter().map(|x| x.abs()).collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Scales magnitudes into [0,1].
///
/// Output is `min(|v|, c) / c` with `c` the global max or the percentile clip.
/// A zero clip level maps every value to zero.
pub fn normalize_map(values: &[f64], mode: NormalizeMode) -> Result<Vec<f64>, CoreError> {
    let clip = match mode {
        NormalizeMode::GlobalMax => values.iter().fold(0.0_f64, |m, v| m.max(v.abs())),
        NormalizeMode::Percentile(p) => {
            if !(p > 0.0 && p <= 100.0) {
                return Err(CoreError::InvalidPercentile(p));
            }
            if values.is_empty() {
                return Ok(Vec::new());
            }
            percentile_nearest_rank(&sorted_abs(values), p)
        }
    };
    if clip <= 0.0 || !clip.is_finite() {
        return Ok(vec![0.0; values.len()]);
    }
    Ok(values.iter().map(|v| v.abs().min(clip) / clip).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub mean: f64,
    pub p95: f64,
    pub max: f64,
}

impl SummaryStats {
    pub fn of(values: &[f64]) -> Self {
        if values.is_empty() {
            return Self { mean: 0.0, p95: 0.0, max: 0.0 };
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Self {
            mean: values.iter().sum::<f64>() / values.len() as f64,
            p95: percentile_nearest_rank(&sorted, 95.0),
            max: sorted[sorted.len() - 1],
        }
    }
}

/// A filter output: 1 or 3 channels of values in [0,1], same size as its source image.
#[derive(Clone, Debug, PartialEq)]
pub struct AnalysisMap {
    pub width: u32,
    pub height: u32,
    pub channels: u8,
    pub values: Vec<f64>,
    pub kind: MapKind,
    /// Canonical JSON of the generating parameters.
    pub params: Value,
    pub params_digest: ContentHash,
}

/// Digest of `{"kind": .., "params": ..}` in canonical JSON.
pub fn params_digest(kind: MapKind, params: &Value) -> ContentHash {
    let doc = json!({ "kind": kind.as_str(), "params": params });
    compute_hash(&to_canonical_bytes(&doc).expect("JSON values always serialize"))
}

impl AnalysisMap {
    pub fn new(
        width: u32,
        height: u32,
        channels: u8,
        values: Vec<f64>,
        kind: MapKind,
        params: Value,
    ) -> Self {
        debug_assert_eq!(values.len(), width as usize * height as usize * channels as usize);
        let params = crate::canonical::canonicalize(params);
        let params_digest = params_digest(kind, &params);
        Self {
            width,
            height,
            channels,
            values,
            kind,
            params,
            params_digest,
        }
    }

    /// Value of channel `c` at pixel (x, y).
    pub fn at(&self, x: u32, y: u32, c: usize) -> f64 {
        let idx = (y as usize * self.width as usize + x as usize) * self.channels as usize + c;
        self.values[idx]
    }

    pub fn stats(&self) -> SummaryStats {
        SummaryStats::of(&self.values)
    }

    pub fn to_u8(&self) -> Vec<u8> {
        self.values
            .iter()
            .map(|v| (v.clamp(0.0, 1.0) * 255.0).round() as u8)
            .collect()
    }

    /// Text embedded in the PNG: kind, params and their digest.
    pub fn png_text(&self) -> String {
        let doc = json!({
            "digest": self.params_digest.to_hex(),
            "kind": self.kind.as_str(),
            "params": self.params,
        });
        String::from_utf8(to_canonical_bytes(&doc).expect("serializable")).expect("utf-8")
    }

    /// 8-bit grayscale or RGB PNG carrying a `printproof:params` text chunk.
    pub fn to_png(&self) -> Vec<u8> {
        encode_png(
            self.width,
            self.height,
            self.channels,
            &self.to_u8(),
            &[(PNG_PARAMS_KEYWORD, self.png_text())],
        )
        .expect("in-memory PNG encoding of a valid map")
    }
}

pub(crate) fn encode_png(
    width: u32,
    height: u32,
    channels: u8,
    data: &[u8],
    text: &[(&str, String)],
) -> Result<Vec<u8>, png::EncodingError> {
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, width, height);
        enc.set_color(if channels == 1 {
            png::ColorType::Grayscale
        } else {
            png::ColorType::Rgb
        });
        enc.set_depth(png::BitDepth::Eight);
        for (k, v) in text {
            enc.add_text_chunk((*k).to_string(), v.clone())?;
        }
        let mut writer = enc.write_header()?;
        writer.write_image_data(data)?;
        writer.finish()?;
    }
    Ok(out)
}

/// Reads the `printproof:params` text chunk back out of a map PNG.
pub fn read_png_params(bytes: &[u8]) -> Option<String> {
    let decoder = png::Decoder::new(std::io::Cursor::new(bytes));
    let reader = decoder.read_info().ok()?;
    reader
        .info()
        .uncompressed_latin1_text
        .iter()
        .find(|c| c.keyword == PNG_PARAMS_KEYWORD)
        .map(|c| c.text.clone())
}
