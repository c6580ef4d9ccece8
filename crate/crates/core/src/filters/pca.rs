//! Principal components of the RGB pixel cloud and per-pixel projection maps.

use nalgebra::{Matrix3, SymmetricEigen};
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{par_rows, FilterError};
use crate::map::{AnalysisMap, MapKind};
use crate::raster::RasterImage;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PcaMode {
    Projection,
    Distance,
}

impl PcaMode {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Projection => "projection",
            Self::Distance => "distance",
        }
    }
}

impl std::str::FromStr for PcaMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "projection" => Ok(Self::Projection),
            "distance" => Ok(Self::Distance),
            other => Err(format!("unknown mode {other:?}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PcaBasis {
    /// Mean RGB on the [0,1] scale.
    pub mean: [f64; 3],
    /// Unit eigenvectors, ordered with `eigenvalues`.
    pub components: [[f64; 3]; 3],
    pub eigenvalues: [f64; 3],
    /// All pixels identical: zero covariance, canonical axes.
    pub degenerate: bool,
}

fn unit(rgb: [u8; 3]) -> [f64; 3] {
    rgb.map(|c| c as f64 / 255.0)
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Flips `v` so its largest-magnitude entry (first on ties) is positive.
pub fn canonical_sign(mut v: [f64; 3]) -> [f64; 3] {
    let mut k = 0;
    for i in 1..3 {
        if v[i].abs() > v[k].abs() {
            k = i;
        }
    }
    if v[k] < 0.0 {
        v = v.map(|x| -x);
    }
    v
}

/// Population covariance (divide by N) of the pixel colors.
pub fn covariance(img: &RasterImage) -> ([f64; 3], [[f64; 3]; 3]) {
    let n = img.len() as f64;
    let mut mean = [0.0; 3];
    for &p in img.pixels() {
        let u = unit(p);
        for c in 0..3 {
            mean[c] += u[c];
        }
    }
    mean = mean.map(|m| m / n);
    let mut cov = [[0.0; 3]; 3];
    for &p in img.pixels() {
        let u = unit(p);
        let d = [u[0] - mean[0], u[1] - mean[1], u[2] - mean[2]];
        for i in 0..3 {
            for j in i..3 {
                cov[i][j] += d[i] * d[j];
            }
        }
    }
    for i in 0..3 {
        for j in i..3 {
            cov[i][j] /= n;
            cov[j][i] = cov[i][j];
        }
    }
    (mean, cov)
}

pub fn pca_basis(img: &RasterImage) -> PcaBasis {
    let (mean, cov) = covariance(img);
    let first = img.pixels()[0];
    if img.pixels().iter().all(|&p| p == first) {
        return PcaBasis {
            mean,
            components: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            eigenvalues: [0.0; 3],
            degenerate: true,
        };
    }
    let m = Matrix3::from_fn(|i, j| cov[i][j]);
    let eig = SymmetricEigen::new(m);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let mut components = [[0.0; 3]; 3];
    let mut eigenvalues = [0.0; 3];
    for (k, &i) in order.iter().enumerate() {
        let col = eig.eigenvectors.column(i);
        let norm = col.norm();
        components[k] = canonical_sign([col[0] / norm, col[1] / norm, col[2] / norm]);
        eigenvalues[k] = eig.eigenvalues[i].max(0.0);
    }
    PcaBasis { mean, components, eigenvalues, degenerate: false }
}

/// Raw (unnormalized) projections of every centered pixel on all three components.
pub fn projections(img: &RasterImage, basis: &PcaBasis) -> Vec<[f64; 3]> {
    img.pixels()
        .iter()
        .map(|&p| {
            let u = unit(p);
            let c = [u[0] - basis.mean[0], u[1] - basis.mean[1], u[2] - basis.mean[2]];
            basis.components.map(|v| dot(&c, &v))
        })
        .collect()
}

/// Range below which a projection map is treated as constant.
const FLAT_RANGE: f64 = 1e-12;

pub fn pca_map(
    img: &RasterImage,
    basis: &PcaBasis,
    component: u8,
    mode: PcaMode,
) -> Result<AnalysisMap, FilterError> {
    super::check_range("component", component as i64, 1, 3)?;
    let v = basis.components[component as usize - 1];
    let mu = basis.mean;
    let (w, h) = (img.width() as usize, img.height() as usize);
    let px = img.pixels();
    let raw: Vec<f64> = par_rows(w, h, 1, |y, row| {
        for (x, out) in row.iter_mut().enumerate() {
            let u = unit(px[y * w + x]);
            let c = [u[0] - mu[0], u[1] - mu[1], u[2] - mu[2]];
            let t = dot(&c, &v);
            *out = match mode {
                PcaMode::Projection => t,
                PcaMode::Distance => {
                    let r = [c[0] - t * v[0], c[1] - t * v[1], c[2] - t * v[2]];
                    dot(&r, &r).sqrt()
                }
            };
        }
    });
    let values = match mode {
        PcaMode::Projection => {
            let lo = raw.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if hi - lo <= FLAT_RANGE {
                vec![0.5; raw.len()]
            } else {
                raw.iter().map(|&t| ((t - lo) / (hi - lo)).clamp(0.0, 1.0)).collect()
            }
        }
        PcaMode::Distance => {
            let hi = raw.iter().copied().fold(0.0, f64::max);
            if hi <= FLAT_RANGE {
                vec![0.0; raw.len()]
            } else {
                raw.iter().map(|&d| (d / hi).min(1.0)).collect()
            }
        }
    };
    let kind = match mode {
        PcaMode::Projection => MapKind::PcaProjection,
        PcaMode::Distance => MapKind::PcaDistance,
    };
    Ok(AnalysisMap::new(
        img.width(),
        img.height(),
        1,
        values,
        kind,
        json!({ "component": component, "mode": mode.as_str() }),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn black_white(w: u32, h: u32) -> RasterImage {
        RasterImage::from_fn(w, h, |x, y| if (x + y) % 2 == 0 { [0, 0, 0] } else { [255, 255, 255] }).unwrap()
    }

    #[test]
    fn two_color_cloud() {
        let b = pca_basis(&black_white(4, 4));
        let s = 1.0 / 3f64.sqrt();
        for c in 0..3 {
            assert!((b.components[0][c] - s).abs() < 1e-12);
        }
        assert!((b.eigenvalues[0] - 0.75).abs() < 1e-12);
        assert!(b.eigenvalues[1].abs() < 1e-12 && b.eigenvalues[2].abs() < 1e-12);
        assert!(!b.degenerate);
    }

    #[test]
    fn two_color_maps() {
        let img = black_white(6, 4);
        let b = pca_basis(&img);
        let d = pca_map(&img, &b, 1, PcaMode::Distance).unwrap();
        assert!(d.values.iter().all(|&v| v == 0.0));
        let p = pca_map(&img, &b, 2, PcaMode::Projection).unwrap();
        assert!(p.values.iter().all(|&v| v == 0.5));
        let p1 = pca_map(&img, &b, 1, PcaMode::Projection).unwrap();
        assert_eq!(p1.at(0, 0, 0), 0.0);
        assert_eq!(p1.at(1, 0, 0), 1.0);
    }

    #[test]
    fn constant_image_is_degenerate() {
        let img = RasterImage::from_fn(3, 3, |_, _| [9, 80, 200]).unwrap();
        let b = pca_basis(&img);
        assert!(b.degenerate);
        assert_eq!(b.eigenvalues, [0.0; 3]);
        assert_eq!(b.components[0], [1.0, 0.0, 0.0]);
        let m = pca_map(&img, &b, 1, PcaMode::Projection).unwrap();
        assert!(m.values.iter().all(|&v| v == 0.5));
    }

    #[test]
    fn sign_rule() {
        assert_eq!(canonical_sign([0.1, -0.9, 0.3]), [-0.1, 0.9, -0.3]);
        assert_eq!(canonical_sign([-0.5, 0.5, 0.0]), [0.5, -0.5, 0.0]);
    }

    #[test]
    fn bad_component() {
        let img = black_white(3, 3);
        let b = pca_basis(&img);
        assert!(pca_map(&img, &b, 0, PcaMode::Distance).is_err());
        assert!(pca_map(&img, &b, 4, PcaMode::Distance).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn image() -> impl Strategy<Value = RasterImage> {
            (2u32..10, 2u32..10).prop_flat_map(|(w, h)| {
                proptest::collection::vec(any::<[u8; 3]>(), (w * h) as usize)
                    .prop_map(move |px| RasterImage::from_pixels(w, h, px).unwrap())
            })
        }

        proptest! {
            #[test]
            fn orthonormal_and_trace(img in image()) {
                let b = pca_basis(&img);
                let (_, cov) = covariance(&img);
                let trace = cov[0][0] + cov[1][1] + cov[2][2];
                let sum: f64 = b.eigenvalues.iter().sum();
                prop_assert!((sum - trace).abs() <= 1e-6 * trace.max(1e-300) || trace == 0.0);
                for i in 0..3 {
                    for j in 0..3 {
                        let d = dot(&b.components[i], &b.components[j]);
                        let want = if i == j { 1.0 } else { 0.0 };
                        prop_assert!((d - want).abs() < 1e-9);
                    }
                }
                prop_assert!(b.eigenvalues[0] >= b.eigenvalues[1] && b.eigenvalues[1] >= b.eigenvalues[2]);
            }

            #[test]
            fn channel_permutation_equivariance(img in image()) {
                let swapped = RasterImage::from_pixels(
                    img.width(), img.height(),
                    img.pixels().iter().map(|p| [p[2], p[0], p[1]]).collect(),
                ).unwrap();
                let a = pca_basis(&img);
                let b = pca_basis(&swapped);
                for k in 0..3 {
                    prop_assert!((a.eigenvalues[k] - b.eigenvalues[k]).abs() < 1e-9);
                }
                // Only well-separated components have a unique direction.
                let gap = |l: &[f64; 3], k: usize| {
                    let others = (0..3).filter(|&j| j != k).map(|j| (l[k] - l[j]).abs()).fold(f64::INFINITY, f64::min);
                    others > 1e-3 * l[0].max(1e-12)
                };
                for k in 0..3 {
                    if !a.degenerate && gap(&a.eigenvalues, k) {
                        let v = a.components[k];
                        let expect = canonical_sign([v[2], v[0], v[1]]);
                        for c in 0..3 {
                            prop_assert!((b.components[k][c] - expect[c]).abs() < 1e-6);
                        }
                    }
                }
            }

            #[test]
            fn projections_decorrelate(img in image()) {
                let b = pca_basis(&img);
                let p = projections(&img, &b);
                let n = p.len() as f64;
                let m0 = p.iter().map(|q| q[0]).sum::<f64>() / n;
                let m1 = p.iter().map(|q| q[1]).sum::<f64>() / n;
                let c01 = p.iter().map(|q| (q[0] - m0) * (q[1] - m1)).sum::<f64>() / n;
                prop_assert!(c01.abs() <= 1e-6 * b.eigenvalues[0].max(1e-300) + 1e-15);
            }
        }
    }
}
