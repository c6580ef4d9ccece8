//! Runs every metrology stage an annotation set supports and collects the results.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::Value;

use super::annotation::{AnnotationSet, Axis, LineSegment, Role, Violation};
use super::diagnostics::{chain_points, distortion_profile, tilt_report, DistortionProfile, TiltReport, DEFAULT_TILT_TAU};
use super::height::{corner_interval, random_corner, transfer_height, HeightEstimate, HeightInput, Vertical, METHOD};
use super::vp::{fit_horizon, fit_vanishing_point, Homog, VanishingPoint};
use super::MetroError;
use crate::canonical::to_canonical_value;
use crate::hash::ContentHash;

pub const TILT_IDS: [&str; 4] = ["tilt.left", "tilt.right", "tilt.top", "tilt.bottom"];
pub const RANDOM_DRAWS: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetrologyOptions {
    pub seed: u64,
    pub perturbation_px: f64,
    pub tilt_tau: f64,
}

impl Default for MetrologyOptions {
    fn default() -> Self {
        Self { seed: 0, perturbation_px: 2.0, tilt_tau: DEFAULT_TILT_TAU }
    }
}

impl MetrologyOptions {
    pub fn policy_label(&self) -> String {
        format!(
            "toolkit-defined: +-{} px endpoint perturbation; 256 corner combinations of the height endpoints, plus {RANDOM_DRAWS} seeded corner draws over all segments with refitted vanishing geometry",
            self.perturbation_px
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StageError {
    pub stage: String,
    pub code: &'static str,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetrologyReport {
    pub image_hash: ContentHash,
    pub image_size: [u32; 2],
    pub vanishing_points: BTreeMap<&'static str, VanishingPoint>,
    pub horizon: Option<Homog>,
    pub tilt: Option<TiltReport>,
    pub distortion: BTreeMap<String, DistortionProfile>,
    pub heights: Vec<HeightEstimate>,
    pub errors: Vec<StageError>,
    pub uncertainty_policy: String,
    pub perturbation_px: f64,
    pub seed: u64,
}

impl MetrologyReport {
    pub fn to_json(&self) -> Value {
        to_canonical_value(self).expect("report serializes")
    }

    pub fn height(&self, target_id: &str) -> Option<&HeightEstimate> {
        self.heights.iter().find(|h| h.target_id == target_id)
    }
}

struct Geometry {
    vps: BTreeMap<Axis, VanishingPoint>,
    horizon: Result<Homog, MetroError>,
    vertical: Result<VanishingPoint, MetroError>,
}

fn fit_geometry(ann: &AnnotationSet, mut errors: Option<&mut Vec<StageError>>) -> Geometry {
    let mut vps = BTreeMap::new();
    for axis in [Axis::X, Axis::Y, Axis::ZVertical] {
        let segs = ann.structure(axis);
        if segs.is_empty() {
            continue;
        }
        match fit_vanishing_point(&segs) {
            Ok(vp) => {
                vps.insert(axis, vp);
            }
            Err(e) => {
                if let Some(errs) = errors.as_deref_mut() {
                    push(errs, &format!("vanishing_point:{}", axis.as_str()), e);
                }
            }
        }
    }
    let horizon = match (vps.get(&Axis::X), vps.get(&Axis::Y)) {
        (Some(a), Some(b)) => fit_horizon(a, b),
        _ => Err(MetroError::MissingHorizon),
    };
    let vertical = vps.get(&Axis::ZVertical).cloned().ok_or(MetroError::MissingVerticalVp);
    Geometry { vps, horizon, vertical }
}

fn push(errors: &mut Vec<StageError>, stage: &str, e: MetroError) {
    errors.push(StageError { stage: stage.to_string(), code: e.code(), message: e.to_string() });
}

fn vertical_of(s: &LineSegment) -> Vertical {
    Vertical { base: s.a, top: s.b }
}

/// Validates the annotations against the image and runs every stage they support.
/// Stage failures are reported in `errors`; only invalid annotations fail the call.
pub fn run_metrology(
    ann: &AnnotationSet,
    image_size: (u32, u32),
    opts: &MetrologyOptions,
) -> Result<MetrologyReport, Vec<Violation>> {
    let violations = ann.validate(Some(image_size));
    if !violations.is_empty() {
        return Err(violations);
    }
    let mut errors = Vec::new();
    let geo = fit_geometry(ann, Some(&mut errors));
    if ann.with_role(Role::TargetHeight).next().is_some() {
        if let Err(e) = &geo.horizon {
            push(&mut errors, "horizon", e.clone());
        }
    }

    let tilt_segs: Vec<Option<&LineSegment>> = TILT_IDS.iter().map(|id| ann.by_id(id)).collect();
    let tilt = if tilt_segs.iter().all(Option::is_none) {
        None
    } else if let [Some(l), Some(r), Some(t), Some(b)] = tilt_segs[..] {
        tilt_report(l, r, t, b, opts.tilt_tau).map_err(|e| push(&mut errors, "tilt", e)).ok()
    } else {
        let missing: Vec<&str> = TILT_IDS.iter().zip(&tilt_segs).filter(|(_, s)| s.is_none()).map(|(id, _)| *id).collect();
        push(&mut errors, "tilt", MetroError::MissingTiltSegments { missing: missing.join(", ") });
        None
    };

    let center = [image_size.0 as f64 / 2.0, image_size.1 as f64 / 2.0];
    let mut distortion = BTreeMap::new();
    for (name, segs) in ann.chains() {
        match distortion_profile(&chain_points(&segs), center) {
            Ok(p) => {
                distortion.insert(name, p);
            }
            Err(e) => push(&mut errors, &format!("distortion:{name}"), e),
        }
    }

    let mut heights = Vec::new();
    let reference = ann.with_role(Role::ReferenceHeight).next().zip(ann.reference_height_cm);
    for target in ann.with_role(Role::TargetHeight) {
        let stage = format!("height:{}", target.id);
        let Some((rseg, z_ref)) = reference else {
            push(&mut errors, &stage, MetroError::MissingReference);
            continue;
        };
        let (vertical, horizon) = match (&geo.vertical, &geo.horizon) {
            (Ok(v), Ok(h)) => (v, h),
            (Err(e), _) | (_, Err(e)) => {
                push(&mut errors, &stage, e.clone());
                continue;
            }
        };
        let input = HeightInput { reference: vertical_of(rseg), z_ref, target: vertical_of(target) };
        match transfer_height(input.reference, z_ref, input.target, &vertical.point, horizon) {
            Ok(z) => {
                let (mut lo, mut hi) = corner_interval(&input, opts.perturbation_px, &vertical.point, horizon, z);
                let (rlo, rhi) = random_interval(ann, &target.id, opts, z);
                lo = lo.min(rlo);
                hi = hi.max(rhi);
                heights.push(HeightEstimate { target_id: target.id.clone(), height_cm: z, interval_cm: (lo, hi), method: METHOD });
            }
            Err(e) => push(&mut errors, &stage, e),
        }
    }

    Ok(MetrologyReport {
        image_hash: ann.image_hash.clone(),
        image_size: [image_size.0, image_size.1],
        vanishing_points: geo.vps.into_iter().map(|(a, v)| (a.as_str(), v)).collect(),
        horizon: geo.horizon.ok(),
        tilt,
        distortion,
        heights,
        errors,
        uncertainty_policy: opts.policy_label(),
        perturbation_px: opts.perturbation_px,
        seed: opts.seed,
    })
}

/// Seeded draws that jitter every structure and height endpoint, refit the
/// vanishing geometry and recompute the target height.
fn random_interval(ann: &AnnotationSet, target_id: &str, opts: &MetrologyOptions, nominal: f64) -> (f64, f64) {
    // Per-target stream so adding a target does not shift the others.
    let salt = crate::hash::compute_hash(target_id.as_bytes());
    let mut seed = [0u8; 32];
    for (i, b) in seed.iter_mut().enumerate() {
        *b = salt.as_bytes()[i] ^ opts.seed.to_le_bytes()[i % 8];
    }
    let mut rng = ChaCha8Rng::from_seed(seed);
    let (mut lo, mut hi) = (nominal, nominal);
    let z_ref = ann.reference_height_cm.unwrap_or(0.0);
    for _ in 0..RANDOM_DRAWS {
        let mut jittered = ann.clone();
        for s in jittered.segments.iter_mut() {
            if matches!(s.role, Role::Structure | Role::ReferenceHeight | Role::TargetHeight) {
                s.a = random_corner(&mut rng, s.a, opts.perturbation_px);
                s.b = random_corner(&mut rng, s.b, opts.perturbation_px);
            }
        }
        let geo = fit_geometry(&jittered, None);
        let (Ok(v), Ok(h)) = (&geo.vertical, &geo.horizon) else { continue };
        let (Some(r), Some(t)) = (
            jittered.with_role(Role::ReferenceHeight).next(),
            jittered.by_id(target_id),
        ) else {
            continue;
        };
        if let Ok(z) = transfer_height(vertical_of(r), z_ref, vertical_of(t), &v.point, h) {
            if z.is_finite() {
                lo = lo.min(z);
                hi = hi.max(z);
            }
        }
    }
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seg(id: &str, a: [f64; 2], b: [f64; 2], axis: Axis, role: Role) -> LineSegment {
        LineSegment::new(id, a, b, axis, role)
    }

    /// Frontal scene: verticals parallel, x lines meet at (1000, 100), y lines at (-600, 100).
    fn frontal() -> AnnotationSet {
        let s = Role::Structure;
        AnnotationSet {
            image_hash: crate::compute_hash(b"scene"),
            segments: vec![
                seg("v1", [100.0, 500.0], [100.0, 200.0], Axis::ZVertical, s),
                seg("v2", [700.0, 500.0], [700.0, 150.0], Axis::ZVertical, s),
                seg("x1", [0.0, 400.0], [500.0, 250.0], Axis::X, s),
                seg("x2", [0.0, 700.0], [500.0, 400.0], Axis::X, s),
                seg("y1", [400.0, 400.0], [100.0, 310.0], Axis::Y, s),
                seg("y2", [400.0, 700.0], [100.0, 520.0], Axis::Y, s),
                seg("door", [200.0, 600.0], [200.0, 300.0], Axis::ZVertical, Role::ReferenceHeight),
                seg("man", [500.0, 600.0], [500.0, 325.0], Axis::ZVertical, Role::TargetHeight),
            ],
            reference_height_cm: Some(198.0),
            notes: String::new(),
        }
    }

    #[test]
    fn frontal_scene() {
        let r = run_metrology(&frontal(), (800, 800), &MetrologyOptions::default()).unwrap();
        assert!(r.errors.is_empty(), "{:?}", r.errors);
        assert!(!r.vanishing_points["z_vertical"].finite);
        let h = r.horizon.unwrap();
        assert!((h[2] / h[1] + 100.0).abs() < 1e-6, "{h:?}");
        let man = r.height("man").unwrap();
        assert!((man.height_cm - 181.5).abs() < 1e-6, "{}", man.height_cm);
        assert!(man.interval_cm.0 < 181.5 && man.interval_cm.1 > 181.5);
    }

    #[test]
    fn deterministic_per_seed() {
        let a = run_metrology(&frontal(), (800, 800), &MetrologyOptions { seed: 7, ..Default::default() }).unwrap();
        let b = run_metrology(&frontal(), (800, 800), &MetrologyOptions { seed: 7, ..Default::default() }).unwrap();
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn stage_errors_are_collected() {
        let mut ann = frontal();
        ann.segments.retain(|s| s.id != "door");
        ann.reference_height_cm = None;
        ann.segments.push(seg("tilt.left", [0.0, 0.0], [0.0, 10.0], Axis::Free, Role::Structure));
        let r = run_metrology(&ann, (800, 800), &MetrologyOptions::default()).unwrap();
        let codes: Vec<&str> = r.errors.iter().map(|e| e.code).collect();
        assert_eq!(codes, vec!["MissingTiltSegments", "MissingReference"]);
        assert!(r.heights.is_empty());
    }

    #[test]
    fn invalid_annotations_rejected() {
        let mut ann = frontal();
        ann.segments[0].b = ann.segments[0].a;
        let v = run_metrology(&ann, (800, 800), &MetrologyOptions::default()).unwrap_err();
        assert_eq!(v[0].field, "segments[0].b");
    }
}
