//! Camera tilt from equal-length pairs and lens distortion from straight edges.

use serde::Serialize;

use super::annotation::{LineSegment, Point};
use super::MetroError;

pub const DEFAULT_TILT_TAU: f64 = 0.01;
/// normalized sagitta below which a chain counts as straight.
pub const STRAIGHT_THRESHOLD: f64 = 0.001;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TiltVerdict {
    Level,
    TiltLeft,
    TiltRight,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TiltReport {
    pub lr_ratio: f64,
    pub tb_ratio: f64,
    pub verdict: TiltVerdict,
    pub threshold: f64,
}

pub fn tilt_report(
    left: &LineSegment,
    right: &LineSegment,
    top: &LineSegment,
    bottom: &LineSegment,
    tau: f64,
) -> Result<TiltReport, MetroError> {
    for s in [left, right, top, bottom] {
        if !(s.length() > 0.0) {
            return Err(MetroError::ZeroLengthSegment { id: s.id.clone() });
        }
    }
    let lr = left.length() / right.length();
    let verdict = if lr > 1.0 + tau {
        TiltVerdict::TiltRight
    } else if lr < 1.0 - tau {
        TiltVerdict::TiltLeft
    } else {
        TiltVerdict::Level
    };
    Ok(TiltReport { lr_ratio: lr, tb_ratio: top.length() / bottom.length(), verdict, threshold: tau })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DistortionSign {
    Pincushion,
    Barrel,
    None,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistortionProfile {
    pub max_sagitta_px: f64,
    pub normalized_sagitta: f64,
    pub sign: DistortionSign,
}

/// Points of a chain in drawing order, dropping repeats where segments join.
pub fn chain_points(segments: &[&LineSegment]) -> Vec<Point> {
    let mut pts: Vec<Point> = Vec::new();
    for s in segments {
        for p in [s.a, s.b] {
            if pts.last() != Some(&p) {
                pts.push(p);
            }
        }
    }
    pts
}

/// Sagitta of interior points against the end-to-end chord.
///
/// Bulge away from `center` is reported as pincushion, toward it as barrel.
pub fn distortion_profile(chain: &[Point], center: Point) -> Result<DistortionProfile, MetroError> {
    if chain.len() < 3 {
        return Err(MetroError::ChainTooShort { points: chain.len() });
    }
    let (p0, pn) = (chain[0], chain[chain.len() - 1]);
    let d = [pn[0] - p0[0], pn[1] - p0[1]];
    let len = d[0].hypot(d[1]);
    if len == 0.0 {
        return Err(MetroError::ChainTooShort { points: chain.len() });
    }
    let side = |p: Point| (d[0] * (p[1] - p0[1]) - d[1] * (p[0] - p0[0])) / len;
    let peak = chain[1..chain.len() - 1]
        .iter()
        .map(|&p| side(p))
        .fold(0.0_f64, |m, s| if s.abs() > m.abs() { s } else { m });
    let normalized = peak.abs() / len;
    let center_side = side(center);
    let sign = if normalized < STRAIGHT_THRESHOLD || center_side == 0.0 {
        DistortionSign::None
    } else if peak.signum() == center_side.signum() {
        DistortionSign::Barrel
    } else {
        DistortionSign::Pincushion
    };
    Ok(DistortionProfile { max_sagitta_px: peak.abs(), normalized_sagitta: normalized, sign })
}
