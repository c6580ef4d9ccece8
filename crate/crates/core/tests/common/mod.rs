//! Shared fixtures and independent oracles for the integration tests.
#![allow(dead_code)]

pub mod demo;
pub mod fixtures;
pub mod pca_oracle;
pub mod pinhole;
pub mod splice;

use std::time::{Duration, Instant};

pub fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed())
}
