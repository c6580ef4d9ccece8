//! Vanishing points and the horizon from annotated segments.

use nalgebra::{Matrix3, SymmetricEigen, Vector3};
use serde::Serialize;

use super::annotation::LineSegment;
use super::MetroError;

pub type Homog = [f64; 3];

pub fn cross(a: &Homog, b: &Homog) -> Homog {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn dot3(a: &Homog, b: &Homog) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn norm3(a: &Homog) -> f64 {
    dot3(a, a).sqrt()
}

pub fn homog(p: [f64; 2]) -> Homog {
    [p[0], p[1], 1.0]
}

/// Line through two points, scaled so that (l0, l1) is a unit normal.
pub fn line_through(a: [f64; 2], b: [f64; 2]) -> Homog {
    let l = cross(&homog(a), &homog(b));
    let n = l[0].hypot(l[1]);
    [l[0] / n, l[1] / n, l[2] / n]
}

/// Minimum segment length accepted for a fit, in pixels.
pub const MIN_SEGMENT_PX: f64 = 2.0;
/// |w| (conditioned, unit vector) below which a VP is reported at infinity.
const INFINITE_W: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VanishingPoint {
    /// Unit homogeneous vector; third entry exactly 0 when at infinity.
    pub point: Homog,
    pub finite: bool,
    pub rms_residual: f64,
    pub support: usize,
}

impl VanishingPoint {
    pub fn finite_point(&self) -> Option<[f64; 2]> {
        self.finite.then(|| [self.point[0] / self.point[2], self.point[1] / self.point[2]])
    }

    /// Unit image direction (meaningful for points at infinity).
    pub fn direction(&self) -> [f64; 2] {
        let n = self.point[0].hypot(self.point[1]);
        [self.point[0] / n, self.point[1] / n]
    }

    pub fn at_infinity(dir: [f64; 2]) -> Self {
        let n = dir[0].hypot(dir[1]);
        Self { point: [dir[0] / n, dir[1] / n, 0.0], finite: false, rms_residual: 0.0, support: 0 }
    }

    pub fn finite_at(p: [f64; 2]) -> Self {
        let h = homog(p);
        let n = norm3(&h);
        Self { point: h.map(|v| v / n), finite: true, rms_residual: 0.0, support: 0 }
    }
}

fn rms_residual(segments: &[LineSegment], vp: &Homog, finite: bool) -> f64 {
    let sq: f64 = segments
        .iter()
        .map(|s| {
            if finite {
                let l = line_through(s.a, s.b);
                let d = dot3(&l, vp) / vp[2];
                d * d
            } else {
                let n = vp[0].hypot(vp[1]);
                let (dx, dy) = (vp[0] / n, vp[1] / n);
                let m = [(s.a[0] + s.b[0]) / 2.0, (s.a[1] + s.b[1]) / 2.0];
                let e = dx * (s.a[1] - m[1]) - dy * (s.a[0] - m[0]);
                e * e
            }
        })
        .sum();
    (sq / segments.len() as f64).sqrt()
}

/// Least-squares VP: smallest eigenvector of sum(w l l^T) over the segment lines.
///
/// Coordinates are first centered on the annotation bounding box and scaled by
/// its half-diagonal; lines have unit normals and weight equal to segment
/// length, so splitting a segment into collinear pieces leaves the system unchanged.
pub fn fit_vanishing_point(segments: &[LineSegment]) -> Result<VanishingPoint, MetroError> {
    if segments.len() < 2 {
        return Err(MetroError::TooFewSegments { have: segments.len(), need: 2 });
    }
    if let Some(s) = segments.iter().find(|s| !(s.length() > MIN_SEGMENT_PX)) {
        return Err(MetroError::ShortSegment { id: s.id.clone() });
    }
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for s in segments {
        for p in [s.a, s.b] {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
    }
    let c = [(lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0];
    let scale = ((hi[0] - lo[0]).hypot(hi[1] - lo[1]) / 2.0).max(1.0);
    let cond = |p: [f64; 2]| [(p[0] - c[0]) / scale, (p[1] - c[1]) / scale];

    let mut m = Matrix3::<f64>::zeros();
    for s in segments {
        let l = Vector3::from(line_through(cond(s.a), cond(s.b)));
        m += s.length() * l * l.transpose();
    }
    let eig = SymmetricEigen::new(m);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let (smallest, mid, largest) = (order[0], order[1], order[2]);
    if eig.eigenvalues[mid] <= 1e-12 * eig.eigenvalues[largest] {
        return Err(MetroError::DegenerateSegments);
    }
    let v = eig.eigenvectors.column(smallest);
    let (vx, vy, vw) = (v[0], v[1], v[2]);
    let (point, finite) = if vw.abs() < INFINITE_W {
        let n = vx.hypot(vy);
        ([vx / n, vy / n, 0.0], false)
    } else {
        let p = [scale * vx + c[0] * vw, scale * vy + c[1] * vw, vw];
        let n = norm3(&p);
        let s = if p[2] < 0.0 { -1.0 } else { 1.0 };
        (p.map(|x| s * x / n), true)
    };
    // Fixed sign for directions so the output does not depend on the solver.
    let point = if !finite && (point[0] < 0.0 || (point[0] == 0.0 && point[1] < 0.0)) {
        point.map(|x| -x)
    } else {
        point
    };
    Ok(VanishingPoint { point, finite, rms_residual: rms_residual(segments, &point, finite), support: segments.len() })
}

/// Vanishing line through two VPs, normalized to a unit normal with l1 >= 0.
pub fn fit_horizon(a: &VanishingPoint, b: &VanishingPoint) -> Result<Homog, MetroError> {
    let pa = a.point.map(|x| x / norm3(&a.point));
    let pb = b.point.map(|x| x / norm3(&b.point));
    let l = cross(&pa, &pb);
    if norm3(&l) < 1e-12 {
        return Err(MetroError::IdenticalVps);
    }
    let n = l[0].hypot(l[1]);
    let n = if n < 1e-15 { norm3(&l) } else { n };
    let flip = l[1] < 0.0 || (l[1] == 0.0 && l[0] < 0.0);
    let s = if flip { -1.0 / n } else { 1.0 / n };
    Ok(l.map(|x| x * s))
}
