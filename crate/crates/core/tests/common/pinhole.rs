//! Ideal pinhole camera and synthetic scenes with known answers.
//!
//! World frame: X and Y span the ground plane, Z is up, units are cm.
//! Camera frame: x right, y down, z forward.

use printproof::metrology::{AnnotationSet, Axis, LineSegment, Role};
use printproof::ContentHash;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type V3 = [f64; 3];

fn sub(a: V3, b: V3) -> V3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: V3, b: V3) -> V3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn dot(a: V3, b: V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn unit(a: V3) -> V3 {
    let n = dot(a, a).sqrt();
    [a[0] / n, a[1] / n, a[2] / n]
}

#[derive(Clone, Debug)]
pub struct Camera {
    pub f: f64,
    pub cx: f64,
    pub cy: f64,
    /// Rows: right, down, forward.
    pub rot: [V3; 3],
    pub center: V3,
    pub width: u32,
    pub height: u32,
}

impl Camera {
    /// `yaw` turns the view about Z (0 looks along +Y), `pitch` > 0 looks up.
    pub fn look(center: V3, yaw: f64, pitch: f64, f: f64, width: u32, height: u32) -> Self {
        let fwd = [yaw.sin() * pitch.cos(), yaw.cos() * pitch.cos(), pitch.sin()];
        let right = unit(cross(fwd, [0.0, 0.0, 1.0]));
        let down = cross(fwd, right);
        Self { f, cx: width as f64 / 2.0, cy: height as f64 / 2.0, rot: [right, down, fwd], center, width, height }
    }

    fn to_cam(&self, d: V3) -> V3 {
        [dot(self.rot[0], d), dot(self.rot[1], d), dot(self.rot[2], d)]
    }

    pub fn project(&self, p: V3) -> [f64; 2] {
        let c = self.to_cam(sub(p, self.center));
        assert!(c[2] > 1.0, "point behind the camera");
        [self.f * c[0] / c[2] + self.cx, self.f * c[1] / c[2] + self.cy]
    }

    /// Homogeneous image of the point at infinity in direction `d`.
    pub fn vanishing(&self, d: V3) -> V3 {
        let c = self.to_cam(d);
        [self.f * c[0] + self.cx * c[2], self.f * c[1] + self.cy * c[2], c[2]]
    }

    pub fn vanishing_finite(&self, d: V3) -> Option<[f64; 2]> {
        let v = self.vanishing(d);
        (v[2].abs() > 1e-12).then(|| [v[0] / v[2], v[1] / v[2]])
    }

    /// Image of the ground plane's line at infinity, normalized to a unit normal.
    pub fn horizon(&self) -> V3 {
        let l = cross(self.vanishing([1.0, 0.0, 0.0]), self.vanishing([0.0, 1.0, 0.0]));
        let n = (l[0] * l[0] + l[1] * l[1]).sqrt();
        [l[0] / n, l[1] / n, l[2] / n]
    }

    pub fn in_frame(&self, p: [f64; 2], margin: f64) -> bool {
        p[0] >= margin && p[1] >= margin && p[0] <= self.width as f64 - margin && p[1] <= self.height as f64 - margin
    }
}

/// A scene: a box for the structure lines, a door (reference) and a standing
/// figure (target) on the ground plane.
#[derive(Clone, Debug)]
pub struct Scene {
    pub camera: Camera,
    pub box_min: V3,
    pub box_max: V3,
    pub door_base: V3,
    pub door_cm: f64,
    pub target_base: V3,
    pub target_cm: f64,
}

impl Scene {
    fn world_segments(&self) -> Vec<(String, V3, V3, Axis, Role)> {
        let (lo, hi) = (self.box_min, self.box_max);
        let s = Role::Structure;
        vec![
            ("x1".into(), [lo[0], lo[1], 0.0], [hi[0], lo[1], 0.0], Axis::X, s),
            ("x2".into(), [lo[0], lo[1], hi[2]], [hi[0], lo[1], hi[2]], Axis::X, s),
            ("x3".into(), [lo[0], hi[1], hi[2]], [hi[0], hi[1], hi[2]], Axis::X, s),
            ("y1".into(), [hi[0], lo[1], 0.0], [hi[0], hi[1], 0.0], Axis::Y, s),
            ("y2".into(), [hi[0], lo[1], hi[2]], [hi[0], hi[1], hi[2]], Axis::Y, s),
            ("y3".into(), [lo[0], lo[1], hi[2]], [lo[0], hi[1], hi[2]], Axis::Y, s),
            ("z1".into(), [lo[0], lo[1], 0.0], [lo[0], lo[1], hi[2]], Axis::ZVertical, s),
            ("z2".into(), [hi[0], lo[1], 0.0], [hi[0], lo[1], hi[2]], Axis::ZVertical, s),
            ("z3".into(), [hi[0], hi[1], 0.0], [hi[0], hi[1], hi[2]], Axis::ZVertical, s),
            (
                "door".into(),
                self.door_base,
                [self.door_base[0], self.door_base[1], self.door_cm],
                Axis::ZVertical,
                Role::ReferenceHeight,
            ),
            (
                "figure".into(),
                self.target_base,
                [self.target_base[0], self.target_base[1], self.target_cm],
                Axis::ZVertical,
                Role::TargetHeight,
            ),
        ]
    }

    pub fn visible(&self, margin: f64) -> bool {
        self.world_segments().iter().all(|(_, a, b, ..)| {
            let ok = |p: V3| dot(self.camera.to_cam(sub(p, self.camera.center)), [0.0, 0.0, 1.0]) > 10.0;
            ok(*a) && ok(*b) && self.camera.in_frame(self.camera.project(*a), margin) && self.camera.in_frame(self.camera.project(*b), margin)
        })
    }

    /// Annotations with every endpoint displaced by uniform noise in [-noise, noise].
    pub fn annotations(&self, image_hash: ContentHash, noise: f64, rng: Option<&mut ChaCha8Rng>) -> AnnotationSet {
        let mut rng = rng;
        let mut jitter = |p: [f64; 2]| -> [f64; 2] {
            match rng.as_deref_mut() {
                Some(r) if noise > 0.0 => [p[0] + r.gen_range(-noise..=noise), p[1] + r.gen_range(-noise..=noise)],
                _ => p,
            }
        };
        let segments = self
            .world_segments()
            .into_iter()
            .map(|(id, a, b, axis, role)| {
                let pa = jitter(self.camera.project(a));
                let pb = jitter(self.camera.project(b));
                LineSegment::new(id, pa, pb, axis, role)
            })
            .collect();
        AnnotationSet { image_hash, segments, reference_height_cm: Some(self.door_cm), notes: String::new() }
    }

    /// Random camera and subjects: focal 20-50 mm (36 mm sensor width), camera
    /// height 120-180 cm, subject 150-200 cm. Redraws until everything is in frame.
    pub fn random(rng: &mut ChaCha8Rng) -> Self {
        let (w, h) = (1600u32, 1200u32);
        loop {
            let f_mm: f64 = rng.gen_range(20.0..50.0);
            let cam_h: f64 = rng.gen_range(120.0..180.0);
            let yaw: f64 = rng.gen_range(0.35..0.85) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let pitch: f64 = rng.gen_range(-0.2..0.05);
            let f = f_mm / 36.0 * w as f64;
            let dist: f64 = rng.gen_range(500.0..900.0);
            let look = [yaw.sin() * dist, yaw.cos() * dist, 0.0];
            let camera = Camera::look([0.0, 0.0, cam_h], yaw, pitch, f, w, h);
            let bx = [look[0] - 150.0, look[1] - 100.0];
            let scene = Self {
                camera,
                box_min: [bx[0], bx[1], 0.0],
                box_max: [bx[0] + rng.gen_range(150.0..300.0), bx[1] + rng.gen_range(120.0..250.0), rng.gen_range(150.0..260.0)],
                door_base: [look[0] + rng.gen_range(-120.0..120.0), look[1] + rng.gen_range(-150.0..50.0), 0.0],
                door_cm: 198.0,
                target_base: [look[0] + rng.gen_range(-120.0..120.0), look[1] + rng.gen_range(-150.0..50.0), 0.0],
                target_cm: rng.gen_range(150.0..200.0),
            };
            if scene.visible(20.0) {
                return scene;
            }
        }
    }

    /// The shipped demo: 1600x1200, camera at 160 cm, door 198 cm, figure 183 cm.
    pub fn demo() -> Self {
        let (w, h) = (1600u32, 1200u32);
        let camera = Camera::look([0.0, 0.0, 160.0], 0.55, -0.08, 1400.0, w, h);
        Self {
            camera,
            box_min: [530.0, 470.0, 0.0],
            box_max: [730.0, 650.0, 120.0],
            door_base: [267.0, 1009.0, 0.0],
            door_cm: 198.0,
            target_base: [255.0, 606.0, 0.0],
            target_cm: 183.0,
        }
    }
}
