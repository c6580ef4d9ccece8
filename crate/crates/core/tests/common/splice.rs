//! Splice fixtures: a patch with a lower-quality compression history pasted into
//! a host image, the composite saved at quality 90.

use printproof::RasterImage;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::fixtures::{encode, JpegSpec};

pub const SIZE: u32 = 256;
pub const HOST_QUALITY: u8 = 90;

pub struct Splice {
    pub jpeg: Vec<u8>,
    /// Patch rectangle (x0, y0, w, h).
    pub rect: (u32, u32, u32, u32),
    pub patch_quality: u8,
}

/// Sum of oriented sinusoids per channel plus uniform sensor-like noise.
pub fn texture(w: u32, h: u32, seed: u64) -> RasterImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let waves: Vec<[(f64, f64, f64, f64); 3]> = (0..3)
        .map(|_| {
            [0; 3].map(|_| {
                let f = rng.gen_range(0.02..0.2);
                let a = rng.gen_range(0.0..std::f64::consts::PI);
                (f * a.cos(), f * a.sin(), rng.gen_range(0.0..6.3), rng.gen_range(15.0..35.0))
            })
        })
        .collect();
    let noise: Vec<[f64; 3]> = (0..w * h).map(|_| [0; 3].map(|_| rng.gen_range(-12.0..12.0))).collect();
    RasterImage::from_fn(w, h, |x, y| {
        let mut px = [0u8; 3];
        for c in 0..3 {
            let v: f64 = 128.0
                + waves[c].iter().map(|(fx, fy, ph, amp)| amp * (fx * x as f64 + fy * y as f64 + ph).sin()).sum::<f64>()
                + noise[(y * w + x) as usize][c];
            px[c] = v.round().clamp(0.0, 255.0) as u8;
        }
        px
    })
    .unwrap()
}

/// Case `i` of 20: patch quality spread over 50..=70, position and size varied,
/// offsets never aligned to the 8x8 grid.
pub fn case(i: u32) -> Splice {
    let q = 50 + (i * 20 / 19) as u8;
    let host = texture(SIZE, SIZE, 1000 + i as u64);
    let side = 64 + (i % 4) * 8;
    let patch_src = texture(side, side, 5000 + i as u64);
    let patch_jpeg = encode(&patch_src, &JpegSpec { quality: q, subsample: true, ..Default::default() });
    let patch = printproof::load_image(&patch_jpeg).unwrap();
    let x0 = 40 + (i * 37) % 100 + 3;
    let y0 = 30 + (i * 53) % 110 + 5;
    let composite = RasterImage::from_fn(SIZE, SIZE, |x, y| {
        if (x0..x0 + side).contains(&x) && (y0..y0 + side).contains(&y) {
            patch.pixel(x - x0, y - y0)
        } else {
            host.pixel(x, y)
        }
    })
    .unwrap();
    let jpeg = encode(&composite, &JpegSpec { quality: HOST_QUALITY, subsample: true, ..Default::default() });
    Splice { jpeg, rect: (x0, y0, side, side), patch_quality: q }
}

/// Mean map value inside and outside the patch rectangle.
pub fn inside_outside(map: &printproof::AnalysisMap, rect: (u32, u32, u32, u32)) -> (f64, f64) {
    let (x0, y0, w, h) = rect;
    let (mut si, mut ni, mut so, mut no) = (0.0, 0usize, 0.0, 0usize);
    for y in 0..map.height {
        for x in 0..map.width {
            let v: f64 = (0..map.channels as usize).map(|c| map.at(x, y, c)).sum::<f64>() / map.channels as f64;
            if (x0..x0 + w).contains(&x) && (y0..y0 + h).contains(&y) {
                si += v;
                ni += 1;
            } else {
                so += v;
                no += 1;
            }
        }
    }
    (si / ni as f64, so / no as f64)
}
