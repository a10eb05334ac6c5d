//! The time kernel `G(z, t) = (e^{zt} - 1) / z` and the exponent gaps it is built from.

use num_complex::Complex64;

/// Default `|z| t` below which `G` switches to its Taylor series.
pub const DEFAULT_SERIES_THRESHOLD: f64 = 1e-4;

/// Interaction exponents for output frequency `xi` and input frequency `xi1`.
///
/// The product of free evolutions `e^{-t xi1^2 + i t xi1^3}` at `xi1` and
/// `xi - xi1`, divided by the free evolution at `xi`, is `e^{z t}` with
/// `z = -quadratic_gap + i cubic_gap`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentGaps {
    /// `xi1^2 + (xi - xi1)^2 - xi^2`, factored as `-2 xi1 (xi - xi1)`.
    pub quadratic_gap: f64,
    /// `xi1^3 + (xi - xi1)^3 - xi^3`, factored as `-3 xi xi1 (xi - xi1)`.
    pub cubic_gap: f64,
    pub z: Complex64,
    /// `|expanded - factored|` for each gap.
    pub quadratic_mismatch: f64,
    pub cubic_mismatch: f64,
}

pub fn exponent_gaps(xi: f64, xi1: f64) -> ExponentGaps {
    let xi2 = xi - xi1;
    let quadratic = -2.0 * xi1 * xi2;
    let cubic = -3.0 * xi * xi1 * xi2;
    let quadratic_expanded = xi1 * xi1 + xi2 * xi2 - xi * xi;
    let cubic_expanded = xi1.powi(3) + xi2.powi(3) - xi.powi(3);
    ExponentGaps {
        quadratic_gap: quadratic,
        cubic_gap: cubic,
        z: interaction_exponent(xi, xi1),
        quadratic_mismatch: (quadratic_expanded - quadratic).abs(),
        cubic_mismatch: (cubic_expanded - cubic).abs(),
    }
}

/// `z = 2 xi1 (xi - xi1) - 3i xi xi1 (xi - xi1)`.
#[inline]
pub fn interaction_exponent(xi: f64, xi1: f64) -> Complex64 {
    let prod = xi1 * (xi - xi1);
    Complex64::new(2.0 * prod, -3.0 * xi * prod)
}

/// `e^w - 1` without cancellation for small `|w|`.
pub fn cexpm1(w: Complex64) -> Complex64 {
    let (x, y) = (w.re, w.im);
    let em1 = x.exp_m1();
    let half_sin = (0.5 * y).sin();
    Complex64::new(em1 * y.cos() - 2.0 * half_sin * half_sin, x.exp() * y.sin())
}

/// `t * sum_{k>=0} (zt)^k / (k+1)!`, stopped once a term is below `1e-16` of the sum.
pub fn duhamel_series(z: Complex64, t: f64) -> Complex64 {
    let w = z * t;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for k in 1..64 {
        term = term * w / (k as f64 + 1.0);
        sum += term;
        if term.norm() < 1e-16 * sum.norm() {
            break;
        }
    }
    sum * t
}

/// `(e^{zt} - 1) / z` evaluated directly (with a cancellation-safe `e^w - 1`).
pub fn duhamel_direct(z: Complex64, t: f64) -> Complex64 {
    let w = z * t;
    if w.re > 0.0 {
        // e^{zt} (1 - e^{-zt}) / z
        -w.exp() * cexpm1(-w) / z
    } else {
        cexpm1(w) / z
    }
}

/// `G(z, t) = (e^{zt} - 1) / z`, continuous through `z = 0` where it equals `t`.
pub fn duhamel_factor(z: Complex64, t: f64, threshold: f64) -> Complex64 {
    if z.norm() * t < threshold {
        duhamel_series(z, t)
    } else {
        duhamel_direct(z, t)
    }
}

/// `e^{-damping * t} G(z, t)`.
///
/// When `Re z <= damping` (always the case for KdV-Burgers interactions,
/// where `Re z - xi^2 = -xi1^2 - (xi - xi1)^2`) this never overflows, even
/// though `G` alone can.
pub fn damped_duhamel_factor(z: Complex64, damping: f64, t: f64, threshold: f64) -> Complex64 {
    let w = z * t;
    let decay = (-damping * t).exp();
    if z.norm() * t < threshold {
        decay * duhamel_series(z, t)
    } else if w.re > 1.0 {
        (((z - damping) * t).exp() - decay) / z
    } else {
        decay * cexpm1(w) / z
    }
}
