//! Shared fixtures for the benchmark targets.

use agd_rc::{AgdParams, RcParams};

/// The reference constants used throughout the benchmarks.
pub fn rc_half() -> RcParams {
    RcParams::new(0.5, 0.5).expect("valid constants")
}

/// A heavy-ball point strictly inside the stable region.
pub fn hb_interior() -> AgdParams {
    AgdParams::hb(0.1, 0.5).expect("valid parameters")
}

/// A heavy-ball point near the stability threshold.
pub fn hb_near_threshold() -> AgdParams {
    AgdParams::hb(0.1, 0.59).expect("valid parameters")
}

/// Uniform grid helper for scan benchmarks.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}
