//! Analyst-drawn segments and their JSON form.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::hash::ContentHash;

pub type Point = [f64; 2];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    X,
    Y,
    ZVertical,
    Free,
}

impl Axis {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::X => "x",
            Self::Y => "y",
            Self::ZVertical => "z_vertical",
            Self::Free => "free",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Structure,
    ReferenceHeight,
    TargetHeight,
    StraightnessChain,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LineSegment {
    pub id: String,
    pub a: Point,
    pub b: Point,
    pub axis: Axis,
    pub role: Role,
}

impl LineSegment {
    pub fn new(id: impl Into<String>, a: Point, b: Point, axis: Axis, role: Role) -> Self {
        Self { id: id.into(), a, b, axis, role }
    }

    pub fn length(&self) -> f64 {
        (self.b[0] - self.a[0]).hypot(self.b[1] - self.a[1])
    }

    /// Chain name for straightness chains: the id up to the first ':'.
    pub fn chain_name(&self) -> &str {
        self.id.split(':').next().unwrap_or(&self.id)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnotationSet {
    pub image_hash: ContentHash,
    pub segments: Vec<LineSegment>,
    #[serde(default)]
    pub reference_height_cm: Option<f64>,
    #[serde(default)]
    pub notes: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub field: String,
    pub message: String,
}

impl Violation {
    fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self { field: field.into(), message: message.into() }
    }
}

/// Fraction of the image size annotations may extend past the border.
pub const BOUNDS_MARGIN: f64 = 0.10;

impl AnnotationSet {
    pub fn from_json(bytes: &[u8]) -> Result<Self, serde_json::Error> {
        serde_json::from_slice(bytes)
    }

    pub fn with_role(&self, role: Role) -> impl Iterator<Item = &LineSegment> {
        self.segments.iter().filter(move |s| s.role == role)
    }

    pub fn structure(&self, axis: Axis) -> Vec<LineSegment> {
        self.segments
            .iter()
            .filter(|s| s.role == Role::Structure && s.axis == axis)
            .cloned()
            .collect()
    }

    pub fn by_id(&self, id: &str) -> Option<&LineSegment> {
        self.segments.iter().find(|s| s.id == id)
    }

    /// Straightness chains grouped by name, segments in file order.
    pub fn chains(&self) -> BTreeMap<String, Vec<&LineSegment>> {
        let mut out: BTreeMap<String, Vec<&LineSegment>> = BTreeMap::new();
        for s in self.with_role(Role::StraightnessChain) {
            out.entry(s.chain_name().to_string()).or_default().push(s);
        }
        out
    }

    /// Structural checks. `dims` enables the image-bounds check.
    pub fn validate(&self, dims: Option<(u32, u32)>) -> Vec<Violation> {
        let mut v = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for (i, s) in self.segments.iter().enumerate() {
            let f = |name: &str| format!("segments[{i}].{name}");
            if s.id.is_empty() {
                v.push(Violation::new(f("id"), "empty id"));
            } else if !seen.insert(s.id.as_str()) {
                v.push(Violation::new(f("id"), format!("duplicate id {:?}", s.id)));
            }
            if s.a.iter().chain(&s.b).any(|c| !c.is_finite()) {
                v.push(Violation::new(f("a"), "non-finite coordinate"));
                continue;
            }
            if s.a == s.b {
                v.push(Violation::new(f("b"), "endpoints coincide"));
            }
            if let Some((w, h)) = dims {
                let (mx, my) = (w as f64 * BOUNDS_MARGIN, h as f64 * BOUNDS_MARGIN);
                for (name, p) in [("a", s.a), ("b", s.b)] {
                    if p[0] < -mx || p[0] > w as f64 + mx || p[1] < -my || p[1] > h as f64 + my {
                        v.push(Violation::new(f(name), "outside image bounds plus 10% margin"));
                    }
                }
            }
        }
        let refs = self.with_role(Role::ReferenceHeight).count();
        if refs > 1 {
            v.push(Violation::new("segments", "more than one reference_height segment"));
        }
        match self.reference_height_cm {
            Some(z) if !(z > 0.0 && z.is_finite()) => {
                v.push(Violation::new("reference_height_cm", "must be > 0"));
            }
            Some(_) if refs == 0 => {
                v.push(Violation::new("reference_height_cm", "no reference_height segment to attach to"));
            }
            None if refs > 0 => {
                v.push(Violation::new("reference_height_cm", "reference_height segment present without a height"));
            }
            _ => {}
        }
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(segments: Vec<LineSegment>, z: Option<f64>) -> AnnotationSet {
        AnnotationSet { image_hash: crate::compute_hash(b""), segments, reference_height_cm: z, notes: String::new() }
    }

    #[test]
    fn json_shape() {
        let json = format!(
            r#"{{"image_hash":"{}","segments":[{{"id":"door","a":[10,200],"b":[10.5,40],"axis":"z_vertical","role":"reference_height"}}],"reference_height_cm":198,"notes":"n"}}"#,
            crate::compute_hash(b"").to_hex()
        );
        let a = AnnotationSet::from_json(json.as_bytes()).unwrap();
        assert_eq!(a.segments[0].axis, Axis::ZVertical);
        assert_eq!(a.segments[0].role, Role::ReferenceHeight);
        assert!(a.validate(Some((100, 220))).is_empty());
        let back = serde_json::to_value(&a).unwrap();
        assert_eq!(back["segments"][0]["b"], serde_json::json!([10.5, 40.0]));
    }

    #[test]
    fn unknown_fields_rejected() {
        let json = format!(r#"{{"image_hash":"{}","segments":[],"extra":1}}"#, crate::compute_hash(b"").to_hex());
        assert!(AnnotationSet::from_json(json.as_bytes()).is_err());
    }

    #[test]
    fn violations() {
        let s = |id: &str, a: Point, b: Point, role| LineSegment::new(id, a, b, Axis::Free, role);
        let a = set(
            vec![
                s("d", [0.0, 0.0], [0.0, 0.0], Role::Structure),
                s("d", [0.0, 0.0], [500.0, 0.0], Role::ReferenceHeight),
            ],
            Some(-1.0),
        );
        let fields: Vec<String> = a.validate(Some((100, 100))).into_iter().map(|v| v.field).collect();
        assert_eq!(
            fields,
            vec!["segments[0].b", "segments[1].id", "segments[1].b", "reference_height_cm"]
        );
        let missing = set(vec![s("r", [0.0, 0.0], [0.0, 9.0], Role::ReferenceHeight)], None);
        assert_eq!(missing.validate(None)[0].field, "reference_height_cm");
    }

    #[test]
    fn chains_grouped_by_prefix() {
        let s = |id: &str| LineSegment::new(id, [0.0, 0.0], [1.0, 0.0], Axis::Free, Role::StraightnessChain);
        let a = set(vec![s("top:0"), s("left:0"), s("top:1")], None);
        let c = a.chains();
        assert_eq!(c["top"].len(), 2);
        assert_eq!(c["left"].len(), 1);
    }
}
