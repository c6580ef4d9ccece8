//! Decoded pixel buffers and channel planes.

use image::ImageFormat;
use serde::{Deserialize, Serialize};

use crate::hash::{compute_hash, ContentHash};

#[derive(Debug, thiserror::Error)]
pub enum CoreError {
    #[error("unsupported format: input is neither JPEG nor PNG")]
    UnsupportedFormat,
    #[error("corrupt stream: {0}")]
    CorruptStream(String),
    #[error("invalid dimensions {width}x{height} for {len} pixels")]
    InvalidDimensions { width: u32, height: u32, len: usize },
    #[error("invalid percentile {0}: must lie in (0, 100]")]
    InvalidPercentile(f64),
}

impl CoreError {
    pub fn code(&self) -> &'static str {
        match self {
            Self::UnsupportedFormat => "UNSUPPORTED_FORMAT",
            Self::CorruptStream(_) => "CORRUPT_STREAM",
            Self::InvalidDimensions { .. } => "INVALID_DIMENSIONS",
            Self::InvalidPercentile(_) => "INVALID_PERCENTILE",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceFormat {
    Jpeg,
    Png,
}

impl SourceFormat {
    pub fn sniff(bytes: &[u8]) -> Option<Self> {
        const PNG_MAGIC: [u8; 8] = [0x89, b'P', b'N', b'G', 0x0D, 0x0A, 0x1A, 0x0A];
        if bytes.starts_with(&[0xFF, 0xD8]) {
            Some(Self::Jpeg)
        } else if bytes.starts_with(&PNG_MAGIC) {
            Some(Self::Png)
        } else {
            None
        }
    }

    pub fn mime(self) -> &'static str {
        match self {
            Self::Jpeg => "image/jpeg",
            Self::Png => "image/png",
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            Self::Jpeg => "jpg",
            Self::Png => "png",
        }
    }
}

/// An 8-bit RGB image together with the digest of the bytes it was decoded from.
#[derive(Clone, Debug, PartialEq)]
pub struct RasterImage {
    width: u32,
    height: u32,
    pixels: Vec<[u8; 3]>,
    source_hash: ContentHash,
    source_format: SourceFormat,
}

impl RasterImage {
    /// Wraps an in-memory pixel buffer. The source hash is taken over the raw RGB bytes.
    pub fn from_pixels(width: u32, height: u32, pixels: Vec<[u8; 3]>) -> Result<Self, CoreError> {
        if width == 0 || height == 0 || pixels.len() != width as usize * height as usize {
            return Err(CoreError::InvalidDimensions {
                width,
                height,
                len: pixels.len(),
            });
        }
        let source_hash = compute_hash(pixels.as_flattened());
        Ok(Self {
            width,
            height,
            pixels,
            source_hash,
            source_format: SourceFormat::Png,
        })
    }

    pub fn from_fn(width: u32, height: u32, f: impl Fn(u32, u32) -> [u8; 3]) -> Result<Self, CoreError> {
        let pixels = (0..height)
            .flat_map(|y| (0..width).map(move |x| (x, y)))
            .map(|(x, y)| f(x, y))
            .collect();
        Self::from_pixels(width, height, pixels)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn pixels(&self) -> &[[u8; 3]] {
        &self.pixels
    }

    pub fn pixel(&self, x: u32, y: u32) -> [u8; 3] {
        self.pixels[y as usize * self.width as usize + x as usize]
    }

    pub fn source_hash(&self) -> &ContentHash {
        &self.source_hash
    }

    pub fn source_format(&self) -> SourceFormat {
        self.source_format
    }

    pub fn as_rgb_bytes(&self) -> &[u8] {
        self.pixels.as_flattened()
    }

    /// Digest of the decoded RGB buffer (not of the source file).
    pub fn pixel_hash(&self) -> ContentHash {
        compute_hash(self.as_rgb_bytes())
    }

    /// Lossless PNG serialization of the pixel buffer.
    pub fn to_png(&self) -> Vec<u8> {
        crate::map::encode_png(self.width, self.height, 3, self.as_rgb_bytes(), &[])
            .expect("in-memory PNG encoding of a valid buffer")
    }
}

/// Decodes a JPEG (baseline or progressive) or PNG byte stream.
pub fn load_image(bytes: &[u8]) -> Result<RasterImage, CoreError> {
    let format = SourceFormat::sniff(bytes).ok_or(CoreError::UnsupportedFormat)?;
    let image_format = match format {
        SourceFormat::Jpeg => ImageFormat::Jpeg,
        SourceFormat::Png => ImageFormat::Png,
    };
    let decoded = image::load_from_memory_with_format(bytes, image_format)
        .map_err(|e| CoreError::CorruptStream(e.to_string()))?;
    let rgb = decoded.into_rgb8();
    let (width, height) = rgb.dimensions();
    if width == 0 || height == 0 {
        return Err(CoreError::CorruptStream("zero-sized frame".into()));
    }
    let pixels = rgb
        .into_raw()
        .chunks_exact(3)
        .map(|c| [c[0], c[1], c[2]])
        .collect();
    Ok(RasterImage {
        width,
        height,
        pixels,
        source_hash: compute_hash(bytes),
        source_format: format,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    Red,
    Green,
    Blue,
    Luminance,
}

impl Channel {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Red => "red",
            Self::Green => "green",
            Self::Blue => "blue",
            Self::Luminance => "luminance",
        }
    }
}

impl std::str::FromStr for Channel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "red" => Ok(Self::Red),
            "green" => Ok(Self::Green),
            "blue" => Ok(Self::Blue),
            "luminance" => Ok(Self::Luminance),
            other => Err(format!("unknown channel '{other}'")),
        }
    }
}

/// Rec.601 luma of [0,1]-scaled channels.
///
/// Written as `g + 0.299(r-g) + 0.114(b-g)` (the weights sum to one), so an
/// achromatic input is returned bit-exactly.
#[inline]
pub fn rec601_luma(r: f64, g: f64, b: f64) -> f64 {
    g + 0.299 * (r - g) + 0.114 * (b - g)
}

/// A single-channel float plane, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Plane {
    pub width: u32,
    pub height: u32,
    pub data: Vec<f64>,
}

impl Plane {
    pub fn new(width: u32, height: u32, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), width as usize * height as usize);
        Self { width, height, data }
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width as usize + x]
    }

    /// Sample with replicate (clamp-to-edge) padding.
    #[inline]
    pub fn at_clamped(&self, x: isize, y: isize) -> f64 {
        let xc = x.clamp(0, self.width as isize - 1) as usize;
        let yc = y.clamp(0, self.height as isize - 1) as usize;
        self.at(xc, yc)
    }
}

pub fn extract_channel(img: &RasterImage, channel: Channel) -> Plane {
    const S: f64 = 1.0 / 255.0;
    let data = img
        .pixels()
        .iter()
        .map(|p| {
            let [r, g, b] = p.map(|c| c as f64 * S);
            match channel {
                Channel::Red => r,
                Channel::Green => g,
                Channel::Blue => b,
                Channel::Luminance => rec601_luma(r, g, b),
            }
        })
        .collect();
    Plane::new(img.width(), img.height(), data)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solid(w: u32, h: u32, px: [u8; 3]) -> RasterImage {
        RasterImage::from_fn(w, h, |_, _| px).unwrap()
    }

    // 1x1 white RGB PNG produced by the png crate (filter byte 0, one scanline).
    fn white_png() -> Vec<u8> {
        crate::map::encode_png(1, 1, 3, &[255, 255, 255], &[]).unwrap()
    }

    #[test]
    fn decodes_one_pixel_png() {
        let img = load_image(&white_png()).unwrap();
        assert_eq!((img.width(), img.height()), (1, 1));
        assert_eq!(img.pixels(), &[[255, 255, 255]]);
        assert_eq!(img.source_format(), SourceFormat::Png);
        assert_eq!(img.source_hash(), &compute_hash(&white_png()));
    }

    #[test]
    fn truncated_jpeg_is_corrupt() {
        assert!(matches!(load_image(&[0xFF, 0xD8]), Err(CoreError::CorruptStream(_))));
    }

    #[test]
    fn unknown_magic_is_unsupported() {
        assert!(matches!(load_image(b"GIF89a"), Err(CoreError::UnsupportedFormat)));
        assert!(matches!(load_image(&[]), Err(CoreError::UnsupportedFormat)));
    }

    #[test]
    fn png_round_trip_is_lossless() {
        let img = RasterImage::from_fn(17, 9, |x, y| [(x * 13) as u8, (y * 29) as u8, (x ^ y) as u8]).unwrap();
        let again = load_image(&img.to_png()).unwrap();
        assert_eq!(again.pixels(), img.pixels());
        let third = load_image(&again.to_png()).unwrap();
        assert_eq!(third.pixels(), img.pixels());
    }

    #[test]
    fn channel_extraction() {
        let blue = solid(3, 2, [0, 0, 255]);
        assert!(extract_channel(&blue, Channel::Blue).data.iter().all(|&v| v == 1.0));
        assert!(extract_channel(&blue, Channel::Red).data.iter().all(|&v| v == 0.0));
        let gray = solid(2, 2, [128, 128, 128]);
        for v in extract_channel(&gray, Channel::Luminance).data {
            assert_eq!(v, 128.0 / 255.0);
            assert!((v - 0.50196).abs() < 1e-5);
        }
    }

    #[test]
    fn luminance_of_achromatic_is_exact() {
        for v in 0..=255u8 {
            let c = v as f64 / 255.0;
            assert_eq!(rec601_luma(c, c, c), c);
        }
    }

    #[test]
    fn rejects_bad_dimensions() {
        assert!(RasterImage::from_pixels(0, 1, vec![]).is_err());
        assert!(RasterImage::from_pixels(2, 2, vec![[0; 3]; 3]).is_err());
    }
}
