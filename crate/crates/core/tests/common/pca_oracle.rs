//! Brute-force PCA: two-pass covariance, cyclic Jacobi eigensolver, per-pixel
//! maps. Shares no code with the library.

use printproof::RasterImage;

pub struct OracleBasis {
    pub mean: [f64; 3],
    pub vectors: [[f64; 3]; 3],
    pub values: [f64; 3],
    pub trace: f64,
}

pub fn covariance(img: &RasterImage) -> ([f64; 3], [[f64; 3]; 3]) {
    let n = img.len() as f64;
    let mut mean = [0.0; 3];
    for p in img.pixels() {
        for c in 0..3 {
            mean[c] += p[c] as f64 / 255.0;
        }
    }
    for m in &mut mean {
        *m /= n;
    }
    let mut cov = [[0.0; 3]; 3];
    for p in img.pixels() {
        let d: Vec<f64> = (0..3).map(|c| p[c] as f64 / 255.0 - mean[c]).collect();
        for i in 0..3 {
            for j in 0..3 {
                cov[i][j] += d[i] * d[j];
            }
        }
    }
    for row in &mut cov {
        for v in row {
            *v /= n;
        }
    }
    (mean, cov)
}

/// Eigenpairs of a symmetric 3x3 matrix; columns of the returned matrix are vectors.
pub fn jacobi(mut a: [[f64; 3]; 3]) -> ([f64; 3], [[f64; 3]; 3]) {
    let mut v = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    for _sweep in 0..100 {
        let off = a[0][1].powi(2) + a[0][2].powi(2) + a[1][2].powi(2);
        if off < 1e-30 {
            break;
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            if a[p][q].abs() < 1e-300 {
                continue;
            }
            let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
            let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
            let t = if theta == 0.0 { 1.0 } else { t };
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;
            for k in 0..3 {
                let (akp, akq) = (a[k][p], a[k][q]);
                a[k][p] = c * akp - s * akq;
                a[k][q] = s * akp + c * akq;
            }
            for k in 0..3 {
                let (apk, aqk) = (a[p][k], a[q][k]);
                a[p][k] = c * apk - s * aqk;
                a[q][k] = s * apk + c * aqk;
            }
            for k in 0..3 {
                let (vkp, vkq) = (v[k][p], v[k][q]);
                v[k][p] = c * vkp - s * vkq;
                v[k][q] = s * vkp + c * vkq;
            }
        }
    }
    ([a[0][0], a[1][1], a[2][2]], v)
}

/// Same sign rule as the library: largest-magnitude entry (first on ties) positive.
fn orient(mut v: [f64; 3]) -> [f64; 3] {
    let mut k = 0;
    for i in 1..3 {
        if v[i].abs() > v[k].abs() + 1e-12 {
            k = i;
        }
    }
    if v[k] < 0.0 {
        v = v.map(|x| -x);
    }
    v
}

pub fn basis(img: &RasterImage) -> OracleBasis {
    let (mean, cov) = covariance(img);
    let (vals, vecs) = jacobi(cov);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| vals[j].total_cmp(&vals[i]));
    let vectors = order.map(|i| orient([vecs[0][i], vecs[1][i], vecs[2][i]]));
    let values = order.map(|i| vals[i].max(0.0));
    OracleBasis { mean, vectors, values, trace: cov[0][0] + cov[1][1] + cov[2][2] }
}

/// (projection map, distance map) for component `k` (0-based), each normalized
/// as specified: min-max for projections, divide-by-max for distances.
pub fn maps(img: &RasterImage, b: &OracleBasis, k: usize) -> (Vec<f64>, Vec<f64>) {
    let v = b.vectors[k];
    let mut proj = Vec::with_capacity(img.len());
    let mut dist = Vec::with_capacity(img.len());
    for p in img.pixels() {
        let d: [f64; 3] = [0, 1, 2].map(|c| p[c] as f64 / 255.0 - b.mean[c]);
        let t = d[0] * v[0] + d[1] * v[1] + d[2] * v[2];
        proj.push(t);
        let r: f64 = (0..3).map(|c| (d[c] - t * v[c]).powi(2)).sum();
        dist.push(r.sqrt());
    }
    let lo = proj.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = proj.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let proj = if hi - lo <= 1e-12 { vec![0.5; proj.len()] } else { proj.iter().map(|t| (t - lo) / (hi - lo)).collect() };
    let dmax = dist.iter().cloned().fold(0.0, f64::max);
    let dist = if dmax <= 1e-12 { vec![0.0; dist.len()] } else { dist.iter().map(|d| d / dmax).collect() };
    (proj, dist)
}
