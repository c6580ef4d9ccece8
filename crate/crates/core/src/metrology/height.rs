//! Reference-height transfer along the vertical by the cross-ratio.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::annotation::Point;
use super::vp::{cross, dot3, homog, Homog, VanishingPoint};
use super::MetroError;

pub const METHOD: &str = "cross-ratio single-view metrology";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HeightEstimate {
    pub target_id: String,
    pub height_cm: f64,
    pub interval_cm: (f64, f64),
    pub method: &'static str,
}

/// A vertical measurement: `base` on the ground plane, `top` above it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Vertical {
    pub base: Point,
    pub top: Point,
}

fn dehomog(p: &Homog) -> Option<Point> {
    let w = p[2];
    let scale = p[0].abs().max(p[1].abs()).max(1.0);
    (w.abs() > 1e-12 * scale).then(|| [p[0] / w, p[1] / w])
}

fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Pixel distance from `p` to `line` (unit-normal form not required).
fn point_line_distance(p: Point, line: &Homog) -> f64 {
    dot3(line, &homog(p)).abs() / line[0].hypot(line[1])
}

/// Height of `target` given `reference` of known height `z_ref`.
pub fn transfer_height(
    reference: Vertical,
    z_ref: f64,
    target: Vertical,
    vertical_vp: &Homog,
    horizon: &Homog,
) -> Result<f64, MetroError> {
    let (b, t) = (target.base, target.top);
    let (br, tr) = (reference.base, reference.top);
    if point_line_distance(b, horizon) < 1e-9 || point_line_distance(br, horizon) < 1e-9 {
        return Err(MetroError::HorizonThroughBase);
    }
    let base_line = cross(&homog(b), &homog(br));
    let t_tilde = if base_line.iter().all(|v| v.abs() < 1e-12) {
        // Coincident bases: the reference already stands on the target's vertical.
        tr
    } else {
        let u = cross(&base_line, horizon);
        let transfer = cross(&u, &homog(tr));
        let vertical = cross(&homog(b), vertical_vp);
        dehomog(&cross(&transfer, &vertical)).ok_or(MetroError::Unmeasurable)?
    };
    let d_tilde = dist(t_tilde, b);
    if d_tilde < 1e-12 {
        return Err(MetroError::Unmeasurable);
    }
    let ratio = match dehomog(vertical_vp) {
        Some(v) => {
            let den = d_tilde * dist(v, t);
            if den < 1e-12 {
                return Err(MetroError::Unmeasurable);
            }
            dist(t, b) * dist(v, t_tilde) / den
        }
        None => dist(t, b) / d_tilde,
    };
    Ok(z_ref * ratio)
}

/// The four image points a height estimate depends on, in a fixed order.
#[derive(Clone, Copy, Debug)]
pub struct HeightInput {
    pub reference: Vertical,
    pub z_ref: f64,
    pub target: Vertical,
}

impl HeightInput {
    fn points(&self) -> [Point; 4] {
        [self.reference.base, self.reference.top, self.target.base, self.target.top]
    }

    fn with_points(&self, p: [Point; 4]) -> Self {
        Self {
            reference: Vertical { base: p[0], top: p[1] },
            z_ref: self.z_ref,
            target: Vertical { base: p[2], top: p[3] },
        }
    }
}

/// The four ±`delta` corners of a point, in a fixed order.
pub fn corners(p: Point, delta: f64) -> [Point; 4] {
    [
        [p[0] - delta, p[1] - delta],
        [p[0] + delta, p[1] - delta],
        [p[0] - delta, p[1] + delta],
        [p[0] + delta, p[1] + delta],
    ]
}

/// Min/max of the height over all 4^4 corner combinations of the four
/// endpoints; the nominal value is always included.
pub fn corner_interval(
    input: &HeightInput,
    delta: f64,
    vertical_vp: &Homog,
    horizon: &Homog,
    nominal: f64,
) -> (f64, f64) {
    let pts = input.points();
    let c: Vec<[Point; 4]> = pts.iter().map(|&p| corners(p, delta)).collect();
    let (mut lo, mut hi) = (nominal, nominal);
    for i in 0..256usize {
        let pick = [c[0][i & 3], c[1][(i >> 2) & 3], c[2][(i >> 4) & 3], c[3][(i >> 6) & 3]];
        let p = input.with_points(pick);
        if let Ok(z) = transfer_height(p.reference, p.z_ref, p.target, vertical_vp, horizon) {
            if z.is_finite() {
                lo = lo.min(z);
                hi = hi.max(z);
            }
        }
    }
    (lo, hi)
}

/// Picks one ±`delta` corner per coordinate pair.
pub fn random_corner(rng: &mut ChaCha8Rng, p: Point, delta: f64) -> Point {
    let sx = if rng.gen::<bool>() { delta } else { -delta };
    let sy = if rng.gen::<bool>() { delta } else { -delta };
    [p[0] + sx, p[1] + sy]
}

pub fn estimate_height(
    target_id: &str,
    input: &HeightInput,
    vertical_vp: &VanishingPoint,
    horizon: &Homog,
    delta: f64,
) -> Result<HeightEstimate, MetroError> {
    let z = transfer_height(input.reference, input.z_ref, input.target, &vertical_vp.point, horizon)?;
    let interval = corner_interval(input, delta, &vertical_vp.point, horizon, z);
    Ok(HeightEstimate { target_id: target_id.to_string(), height_cm: z, interval_cm: interval, method: METHOD })
}
