//! Least-squares power-law fits.

use crate::math::ln;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerFit {
    /// Exponent `α` in `y ≈ C·x^α`.
    pub slope: f64,
    /// `ln C`.
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// Fits `ln y = α ln x + β` over the pairs with `x > 0`, `y > 0`, both finite.
/// Returns `None` with fewer than two usable points or no spread in `x`.
pub fn loglog_fit(xs: &[f64], ys: &[f64]) -> Option<PowerFit> {
    let usable = || {
        xs.iter()
            .zip(ys)
            .filter(|(x, y)| **x > 0.0 && **y > 0.0 && x.is_finite() && y.is_finite())
            .map(|(x, y)| (ln(*x), ln(*y)))
    };
    let n = usable().count();
    if n < 2 {
        return None;
    }
    let nf = n as f64;
    let (sx, sy) = usable().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / nf, sy / nf);
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in usable() {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if sxx <= 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let r_squared = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    Some(PowerFit { slope, intercept: my - slope * mx, r_squared, points: n })
}
