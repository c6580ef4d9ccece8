//! Single-view geometry over analyst annotations: vanishing points, horizon,
//! tilt, lens distortion and reference-based height transfer.

use thiserror::Error;

pub mod annotation;
pub mod diagnostics;
pub mod height;
pub mod pipeline;
pub mod vp;

pub use annotation::{AnnotationSet, Axis, LineSegment, Point, Role, Violation};
pub use diagnostics::{distortion_profile, tilt_report, DistortionProfile, DistortionSign, TiltReport, TiltVerdict};
pub use height::{estimate_height, transfer_height, HeightEstimate, HeightInput, Vertical};
pub use pipeline::{run_metrology, MetrologyOptions, MetrologyReport};
pub use vp::{fit_horizon, fit_vanishing_point, Homog, VanishingPoint};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum MetroError {
    #[error("{have} segments given, {need} required")]
    TooFewSegments { have: usize, need: usize },
    #[error("segment {id} is too short to define a line")]
    ShortSegment { id: String },
    #[error("segments are collinear; vanishing point undefined")]
    DegenerateSegments,
    #[error("vanishing points coincide; horizon undefined")]
    IdenticalVps,
    #[error("a base point lies on the horizon")]
    HorizonThroughBase,
    #[error("transferred reference falls at infinity")]
    Unmeasurable,
    #[error("no reference_height segment with a height")]
    MissingReference,
    #[error("no vanishing line for the ground plane")]
    MissingHorizon,
    #[error("no vertical vanishing point")]
    MissingVerticalVp,
    #[error("segment {id} has zero length")]
    ZeroLengthSegment { id: String },
    #[error("straightness chain needs 3 distinct points, got {points}")]
    ChainTooShort { points: usize },
    #[error("tilt needs segments {missing}")]
    MissingTiltSegments { missing: String },
}

impl MetroError {
    pub fn code(&self) -> &'static str {
        match self {
            Self::TooFewSegments { .. } => "TooFewSegments",
            Self::ShortSegment { .. } => "ShortSegment",
            Self::DegenerateSegments => "DegenerateSegments",
            Self::IdenticalVps => "IdenticalVPs",
            Self::HorizonThroughBase => "HorizonThroughBase",
            Self::Unmeasurable => "Unmeasurable",
            Self::MissingReference => "MissingReference",
            Self::MissingHorizon => "MissingHorizon",
            Self::MissingVerticalVp => "MissingVerticalVP",
            Self::ZeroLengthSegment { .. } => "ZeroLengthSegment",
            Self::ChainTooShort { .. } => "ChainTooShort",
            Self::MissingTiltSegments { .. } => "MissingTiltSegments",
        }
    }
}
