//! Binomial-series remainders.
//!
//! Both the symbol difference `P_c − P_∞` and the nonlinearity remainder `Q` are
//! second-order Taylor remainders of a power function. Subtracting the first two Taylor
//! terms from `(1 + x)^e` in floating point loses all significant digits once `x` is
//! small, so the remainder is summed directly from its series there.

use crate::math;

/// Below this magnitude the series is summed; above it the closed form is used.
const SERIES_RADIUS: f64 = 0.25;
const MAX_TERMS: usize = 60;

/// `(1 + x)^e − 1 − e·x` for `x > −1`.
pub fn binomial_remainder2(x: f64, e: f64) -> f64 {
    if x.abs() < SERIES_RADIUS {
        // Σ_{n≥2} C(e, n) xⁿ
        let mut coeff = e * (e - 1.0) / 2.0;
        let mut power = x * x;
        let mut sum = 0.0;
        for n in 2..MAX_TERMS {
            let term = coeff * power;
            sum += term;
            if term.abs() <= f64::EPSILON * 1e-3 * sum.abs() || coeff == 0.0 {
                break;
            }
            coeff *= (e - n as f64) / (n as f64 + 1.0);
            power *= x;
        }
        sum
    } else {
        math::pow1p_m1(x, e) - e * x
    }
}

/// `e·x·((1 + x)^{e−1} − 1) − 2·((1 + x)^e − 1 − e·x)`, the combination that appears in
/// the radial derivative of `1/P_∞ − 1/P_c`. Its series starts at `x³`.
pub fn binomial_remainder3(x: f64, e: f64) -> f64 {
    if x.abs() < SERIES_RADIUS {
        // Σ_{n≥3} (n − 2)·C(e, n) xⁿ
        let mut coeff = e * (e - 1.0) * (e - 2.0) / 6.0;
        let mut power = x * x * x;
        let mut sum = 0.0;
        for n in 3..MAX_TERMS {
            let term = (n as f64 - 2.0) * coeff * power;
            sum += term;
            if term.abs() <= f64::EPSILON * 1e-3 * sum.abs() || coeff == 0.0 {
                break;
            }
            coeff *= (e - n as f64) / (n as f64 + 1.0);
            power *= x;
        }
        sum
    } else {
        e * x * math::pow1p_m1(x, e - 1.0) - 2.0 * binomial_remainder2(x, e)
    }
}
