//! Numerical tolerances shared by the whole crate.

/// Relative tolerance for short products of `f64` coefficients.
pub const REL: f64 = 1e-10;

/// Absolute floor paired with [`REL`].
pub const ABS_FLOOR: f64 = 1e-12;

/// Default cone / root-sphere membership tolerance.
pub const CONE: f64 = 1e-9;

/// Reconstruction tolerance for slice coordinates and representation formulas.
pub const RECONSTRUCT: f64 = 1e-9;

/// Slack allowed in the stem/slice norm sandwich.
pub const SANDWICH_SLACK: f64 = 1e-12;

/// Realness tolerance for `A^c A`.
pub const REAL_DENOMINATOR: f64 = 1e-10;

/// `|a - b| <= REL * max(|a|, |b|) + ABS_FLOOR`.
pub fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= REL * a.abs().max(b.abs()) + ABS_FLOOR
}

/// Relative closeness with an explicit scale.
pub fn close_scaled(a: f64, b: f64, scale: f64) -> bool {
    (a - b).abs() <= REL * scale + ABS_FLOOR
}
