//! Noise residual against a local median.

use serde_json::json;

use super::{par_rows, FilterError};
use crate::map::{AnalysisMap, MapKind};
use crate::raster::{rec601_luma, RasterImage};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseParams {
    pub radius: u32,
    pub gain: f64,
}

impl Default for NoiseParams {
    fn default() -> Self {
        Self { radius: 1, gain: 8.0 }
    }
}

impl NoiseParams {
    pub fn window(&self) -> u32 {
        2 * self.radius + 1
    }

    pub fn validate(&self) -> Result<(), FilterError> {
        if !(1..=32).contains(&self.radius) {
            return Err(FilterError::InvalidParam { field: "radius", reason: format!("{} outside 1..=32", self.radius) });
        }
        if !(self.gain > 0.0 && self.gain.is_finite()) {
            return Err(FilterError::InvalidParam { field: "gain", reason: format!("{} must be > 0", self.gain) });
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({ "radius": self.radius, "gain": self.gain })
    }
}

/// Per-channel median over a (2r+1)^2 window with replicate padding.
pub fn median_filter(img: &RasterImage, radius: u32) -> RasterImage {
    let (w, h) = (img.width() as usize, img.height() as usize);
    let r = radius as isize;
    let px = img.pixels();
    let out: Vec<[u8; 3]> = par_rows(w, h, 1, |y, row: &mut [[u8; 3]]| {
        let mut win: [Vec<u8>; 3] = Default::default();
        for (x, out) in row.iter_mut().enumerate() {
            for v in win.iter_mut() {
                v.clear();
            }
            for dy in -r..=r {
                let yy = (y as isize + dy).clamp(0, h as isize - 1) as usize;
                for dx in -r..=r {
                    let xx = (x as isize + dx).clamp(0, w as isize - 1) as usize;
                    let p = px[yy * w + xx];
                    for c in 0..3 {
                        win[c].push(p[c]);
                    }
                }
            }
            let mid = win[0].len() / 2;
            for c in 0..3 {
                out[c] = *win[c].select_nth_unstable(mid).1;
            }
        }
    });
    RasterImage::from_pixels(img.width(), img.height(), out).expect("same dimensions")
}

pub fn noise_map(img: &RasterImage, p: &NoiseParams) -> Result<AnalysisMap, FilterError> {
    p.validate()?;
    let med = median_filter(img, p.radius);
    let values = img
        .pixels()
        .iter()
        .zip(med.pixels())
        .map(|(a, m)| {
            let ch = |c: usize| (0.5 + p.gain * (a[c] as f64 - m[c] as f64) / 255.0).clamp(0.0, 1.0);
            rec601_luma(ch(0), ch(1), ch(2)).clamp(0.0, 1.0)
        })
        .collect();
    Ok(AnalysisMap::new(img.width(), img.height(), 1, values, MapKind::Noise, p.to_json()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_is_half() {
        let img = RasterImage::from_fn(6, 5, |_, _| [77, 3, 250]).unwrap();
        let m = noise_map(&img, &NoiseParams::default()).unwrap();
        assert!(m.values.iter().all(|&v| v == 0.5));
    }

    #[test]
    fn isolated_spike() {
        let img = RasterImage::from_fn(7, 7, |x, y| if (x, y) == (3, 3) { [255; 3] } else { [0; 3] }).unwrap();
        let m = noise_map(&img, &NoiseParams::default()).unwrap();
        for y in 0..7 {
            for x in 0..7 {
                let want = if (x, y) == (3, 3) { 1.0 } else { 0.5 };
                assert_eq!(m.at(x, y, 0), want, "({x},{y})");
            }
        }
    }

    #[test]
    fn default_gain_recorded() {
        let img = RasterImage::from_fn(3, 3, |_, _| [0; 3]).unwrap();
        let m = noise_map(&img, &NoiseParams::default()).unwrap();
        assert_eq!(m.params["gain"], json!(8.0));
        assert_eq!(NoiseParams::default().window(), 3);
    }

    #[test]
    fn median_root_signal() {
        // Column ramp plus impulses: one median pass removes the impulses and
        // leaves a signal the median maps to itself.
        let img = RasterImage::from_fn(24, 16, |x, y| {
            if (x, y) == (6, 5) || (x, y) == (15, 10) {
                [255, 0, 255]
            } else {
                let v = (x * 9) as u8;
                [v, v / 2, 200 - v / 3]
            }
        })
        .unwrap();
        let once = median_filter(&img, 1);
        let m = noise_map(&once, &NoiseParams::default()).unwrap();
        assert!(m.values.iter().all(|&v| v == 0.5));
    }

    #[test]
    fn validation() {
        assert!(NoiseParams { radius: 0, gain: 8.0 }.validate().is_err());
        assert!(NoiseParams { radius: 1, gain: 0.0 }.validate().is_err());
    }
}
