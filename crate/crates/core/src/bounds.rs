//! Closed-form error bounds relating the k-distance, its witnessed
//! approximation and the distance to a compact support.

/// Worst-case ratio `d^w / d` between the witnessed and exact k-distance.
pub const WITNESSED_FACTOR: f64 = 2.0 + std::f64::consts::SQRT_2;

/// `|d_{mu,m0} - d_{nu,m0}| <= w2 / sqrt(m0)`.
pub fn stability_bound(w2: f64, m0: f64) -> f64 {
    w2 / m0.sqrt()
}

/// Sup-norm bound between the distance to a measure and the distance to its
/// `(alpha, ell)`-dimensional support, for a measure within `w2` of it.
pub fn exact_bound(w2: f64, m0: f64, alpha: f64, ell: u32) -> f64 {
    stability_bound(w2, m0) + (m0 / alpha).powf(1.0 / ell as f64)
}

/// Sup-norm bound between the witnessed k-distance and the distance to the
/// support: `6 w2 / sqrt(m0) + 24 (m0 / alpha)^{1/ell}`.
pub fn witnessed_bound(w2: f64, m0: f64, alpha: f64, ell: u32) -> f64 {
    6.0 * stability_bound(w2, m0) + 24.0 * (m0 / alpha).powf(1.0 / ell as f64)
}
