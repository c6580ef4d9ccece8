//! Renders the demo scene and its annotations from the pinhole oracle.

use printproof::metrology::AnnotationSet;
use printproof::{compute_hash, RasterImage};

use super::pinhole::{Scene, V3};

pub fn assets_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("assets").join("demo")
}

fn inside(poly: &[[f64; 2]], p: [f64; 2]) -> bool {
    // Convex polygon, either winding.
    let mut sign = 0.0;
    for i in 0..poly.len() {
        let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
        let c = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
        if c != 0.0 {
            if sign != 0.0 && c.signum() != sign {
                return false;
            }
            sign = c.signum();
        }
    }
    true
}

pub fn render(scene: &Scene) -> RasterImage {
    let cam = &scene.camera;
    let quad = |pts: [V3; 4]| pts.map(|p| cam.project(p));
    let (lo, hi) = (scene.box_min, scene.box_max);
    let d = scene.door_base;
    let t = scene.target_base;
    let depth = |pts: &[V3; 4]| {
        let c = [0, 1, 2].map(|k| pts.iter().map(|p| p[k]).sum::<f64>() / 4.0);
        let rel = [c[0] - cam.center[0], c[1] - cam.center[1], c[2] - cam.center[2]];
        rel[0] * cam.rot[2][0] + rel[1] * cam.rot[2][1] + rel[2] * cam.rot[2][2]
    };
    let polys: Vec<([V3; 4], [u8; 3])> = vec![
        // Box: top and the two faces toward the camera.
        ([[lo[0], lo[1], hi[2]], [hi[0], lo[1], hi[2]], [hi[0], hi[1], hi[2]], [lo[0], hi[1], hi[2]]], [200, 170, 120]),
        ([[lo[0], lo[1], 0.0], [hi[0], lo[1], 0.0], [hi[0], lo[1], hi[2]], [lo[0], lo[1], hi[2]]], [150, 110, 70]),
        ([[lo[0], lo[1], 0.0], [lo[0], hi[1], 0.0], [lo[0], hi[1], hi[2]], [lo[0], lo[1], hi[2]]], [120, 90, 60]),
        // Door panel, 90 cm wide along X.
        ([d, [d[0] + 90.0, d[1], 0.0], [d[0] + 90.0, d[1], scene.door_cm], [d[0], d[1], scene.door_cm]], [90, 60, 40]),
        // Figure as a 40 cm wide slab.
        (
            [[t[0] - 20.0, t[1], 0.0], [t[0] + 20.0, t[1], 0.0], [t[0] + 20.0, t[1], scene.target_cm], [t[0] - 20.0, t[1], scene.target_cm]],
            [40, 70, 150],
        ),
    ];
    // Painter's order: far to near. The box faces are drawn as one group.
    let mut groups: Vec<(f64, Vec<(Vec<[f64; 2]>, [u8; 3])>)> = vec![
        (depth(&polys[0].0), polys[..3].iter().map(|(q, c)| (quad(*q).to_vec(), *c)).collect()),
        (depth(&polys[3].0), vec![(quad(polys[3].0).to_vec(), polys[3].1)]),
        (depth(&polys[4].0), vec![(quad(polys[4].0).to_vec(), polys[4].1)]),
    ];
    groups.sort_by(|a, b| b.0.total_cmp(&a.0));
    let layers: Vec<(Vec<[f64; 2]>, [u8; 3])> = groups.into_iter().flat_map(|(_, g)| g).collect();
    let horizon = cam.horizon();
    let side = |p: [f64; 2]| horizon[0] * p[0] + horizon[1] * p[1] + horizon[2];
    let ground_sign = side(cam.project([lo[0], lo[1], 0.0])).signum();
    RasterImage::from_fn(cam.width, cam.height, |x, y| {
        let p = [x as f64 + 0.5, y as f64 + 0.5];
        let mut px = if side(p).signum() == ground_sign { [170, 165, 155] } else { [205, 220, 235] };
        for (poly, color) in &layers {
            if inside(poly, p) {
                px = *color;
            }
        }
        px
    })
    .unwrap()
}

fn round3(p: [f64; 2]) -> [f64; 2] {
    p.map(|v| (v * 1000.0).round() / 1000.0)
}

/// (scene.png bytes, annotations.json bytes, truth.json bytes)
pub fn build() -> (Vec<u8>, Vec<u8>, Vec<u8>) {
    let scene = Scene::demo();
    let png = render(&scene).to_png();
    let mut ann: AnnotationSet = scene.annotations(compute_hash(&png), 0.0, None);
    for s in &mut ann.segments {
        s.a = round3(s.a);
        s.b = round3(s.b);
    }
    ann.notes = "Synthetic demo: door (reference, 198 cm) and a standing figure (target).".into();
    let mut ann_json = serde_json::to_vec_pretty(&ann).unwrap();
    ann_json.push(b'\n');
    let truth = serde_json::json!({
        "target_id": "figure",
        "target_height_cm": scene.target_cm,
        "reference_height_cm": scene.door_cm,
        "camera_height_cm": scene.camera.center[2],
        "focal_px": scene.camera.f,
        "vanishing_points": {
            "x": scene.camera.vanishing_finite([1.0, 0.0, 0.0]),
            "y": scene.camera.vanishing_finite([0.0, 1.0, 0.0]),
            "z_vertical": scene.camera.vanishing_finite([0.0, 0.0, 1.0]),
        },
    });
    let mut truth_json = serde_json::to_vec_pretty(&truth).unwrap();
    truth_json.push(b'\n');
    (png, ann_json, truth_json)
}
