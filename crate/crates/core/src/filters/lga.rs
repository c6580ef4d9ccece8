//! Luminance gradient analysis: Sobel derivatives rendered as RGB.

use serde_json::json;

use super::{check_range, par_rows, FilterError};
use crate::map::{AnalysisMap, MapKind};
use crate::raster::{extract_channel, Channel, Plane, RasterImage};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LgaParams {
    pub intensity: u8,
    pub channel: Channel,
    pub normalized: bool,
}

impl Default for LgaParams {
    fn default() -> Self {
        Self { intensity: 95, channel: Channel::Blue, normalized: true }
    }
}

impl LgaParams {
    pub fn validate(&self) -> Result<(), FilterError> {
        check_range("intensity", self.intensity as i64, 0, 100)
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "intensity": self.intensity,
            "channel": self.channel.as_str(),
            "normalized": self.normalized,
        })
    }
}

/// Gain applied to raw Sobel responses when `normalized` is off.
pub const UNNORMALIZED_GAIN: f64 = 4.0;

/// 3x3 Sobel derivatives with replicate padding; x grows right, y grows down.
pub fn sobel_gradients(plane: &Plane) -> (Vec<f64>, Vec<f64>) {
    let (w, h) = (plane.width as usize, plane.height as usize);
    let both: Vec<(f64, f64)> = par_rows(w, h, 1, |y, row| {
        let y = y as isize;
        for (x, out) in row.iter_mut().enumerate() {
            let x = x as isize;
            let p = |dx: isize, dy: isize| plane.at_clamped(x + dx, y + dy);
            let gx = (p(1, -1) + 2.0 * p(1, 0) + p(1, 1)) - (p(-1, -1) + 2.0 * p(-1, 0) + p(-1, 1));
            let gy = (p(-1, 1) + 2.0 * p(0, 1) + p(1, 1)) - (p(-1, -1) + 2.0 * p(0, -1) + p(1, -1));
            *out = (gx, gy);
        }
    });
    both.into_iter().unzip()
}

pub fn lga_map(img: &RasterImage, p: &LgaParams) -> Result<AnalysisMap, FilterError> {
    p.validate()?;
    if img.width() < 3 || img.height() < 3 {
        return Err(FilterError::ImageTooSmall { width: img.width(), height: img.height() });
    }
    let plane = extract_channel(img, p.channel);
    let (gx, gy) = sobel_gradients(&plane);
    let base = p.intensity as f64 / 100.0;
    let k = if p.normalized {
        let peak = gx.iter().chain(gy.iter()).fold(0.0_f64, |m, v| m.max(v.abs()));
        if peak > 0.0 { base / peak } else { 0.0 }
    } else {
        base * UNNORMALIZED_GAIN
    };
    let mut values = Vec::with_capacity(gx.len() * 3);
    for (&x, &y) in gx.iter().zip(&gy) {
        values.push((0.5 + k * x).clamp(0.0, 1.0));
        values.push((0.5 + k * y).clamp(0.0, 1.0));
        values.push((k * x.hypot(y)).clamp(0.0, 1.0));
    }
    Ok(AnalysisMap::new(img.width(), img.height(), 3, values, MapKind::Lga, p.to_json()))
}
