//! Composite quadrature and finite-difference stencils on a uniform grid starting at
//! the origin.

use alloc::vec;
use alloc::vec::Vec;

/// Composite Simpson weights for `n` equally spaced nodes with spacing `h`.
///
/// An odd number of intervals is closed with a three-eighths panel on the last three.
pub fn simpson_weights(n: usize, h: f64) -> Vec<f64> {
    let mut w = vec![0.0; n];
    match n {
        0 | 1 => return w,
        2 => {
            w[0] = h / 2.0;
            w[1] = h / 2.0;
            return w;
        }
        3 => {
            w[0] = h / 3.0;
            w[1] = 4.0 * h / 3.0;
            w[2] = h / 3.0;
            return w;
        }
        _ => {}
    }
    let intervals = n - 1;
    let simpson_end = if intervals % 2 == 0 { intervals } else { intervals - 3 };
    for panel in (0..simpson_end).step_by(2) {
        w[panel] += h / 3.0;
        w[panel + 1] += 4.0 * h / 3.0;
        w[panel + 2] += h / 3.0;
    }
    if simpson_end < intervals {
        let k = simpson_end;
        for (offset, weight) in [1.0, 3.0, 3.0, 1.0].iter().enumerate() {
            w[k + offset] += 3.0 * h / 8.0 * weight;
        }
    }
    w
}

/// Reflection symmetry of a function at the origin node.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn flip(self) -> Self {
        match self {
            Self::Even => Self::Odd,
            Self::Odd => Self::Even,
        }
    }

    fn sign(self) -> f64 {
        match self {
            Self::Even => 1.0,
            Self::Odd => -1.0,
        }
    }
}

/// Fourth-order first derivative of samples `f[i] = f(i·h)`.
///
/// Points left of the origin are filled by reflection with the given parity; the last
/// two nodes use one-sided stencils. Needs at least five samples.
pub fn derivative_4th(f: &[f64], h: f64, parity: Parity) -> Vec<f64> {
    let n = f.len();
    assert!(n >= 5, "fourth-order stencil needs at least 5 samples, got {n}");
    let at = |i: isize| -> f64 {
        if i < 0 {
            parity.sign() * f[(-i) as usize]
        } else {
            f[i as usize]
        }
    };
    let mut d = vec![0.0; n];
    for (i, slot) in d.iter_mut().enumerate().take(n - 2) {
        let i = i as isize;
        *slot = (at(i - 2) - 8.0 * at(i - 1) + 8.0 * at(i + 1) - at(i + 2)) / (12.0 * h);
    }
    let i = n - 2;
    d[i] = (3.0 * f[i + 1] + 10.0 * f[i] - 18.0 * f[i - 1] + 6.0 * f[i - 2] - f[i - 3])
        / (12.0 * h);
    let i = n - 1;
    d[i] = (25.0 * f[i] - 48.0 * f[i - 1] + 36.0 * f[i - 2] - 16.0 * f[i - 3] + 3.0 * f[i - 4])
        / (12.0 * h);
    d
}

/// Value at the origin from the first three samples away from it, assuming an even
/// function: exact for `a + b r² + c r⁴`.
pub fn even_extrapolate_origin(f1: f64, f2: f64, f3: f64) -> f64 {
    1.5 * f1 - 0.6 * f2 + 0.1 * f3
}
