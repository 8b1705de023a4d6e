//! The power nonlinearity `f(u) = |u|^{p−1}u` and its second-order remainder.

use crate::math::pow;
use crate::series::binomial_remainder2;

/// Relative perturbation below which the remainder is summed from its series.
const SERIES_RADIUS: f64 = 0.25;

/// `|u|^{p−1}u`.
pub fn power(u: f64, p: f64) -> f64 {
    if u == 0.0 {
        0.0
    } else {
        u.signum() * pow(u.abs(), p)
    }
}

/// `f′(u) = p|u|^{p−1}`.
pub fn power_derivative(u: f64, p: f64) -> f64 {
    if u == 0.0 {
        0.0
    } else {
        p * pow(u.abs(), p - 1.0)
    }
}

/// `F(u) = |u|^{p+1}/(p+1)`.
pub fn power_primitive(u: f64, p: f64) -> f64 {
    pow(u.abs(), p + 1.0) / (p + 1.0)
}

/// `Q(w; u) = f(u + w) − f(u) − f′(u)·w`.
///
/// For `|w| < |u|/4` this is `|u|^p·R(w/u)` with `R` the binomial remainder, which
/// avoids the cancellation between `O(1)` terms when `w ≪ u`.
pub fn remainder(u: f64, w: f64, p: f64) -> f64 {
    if u != 0.0 && w.abs() < SERIES_RADIUS * u.abs() {
        // f is odd, so Q(w; u) = sign(u)·Q(w/sign(u); |u|).
        let x = w / u;
        u.signum() * pow(u.abs(), p) * binomial_remainder2(x, p)
    } else {
        power(u + w, p) - power(u, p) - power_derivative(u, p) * w
    }
}
