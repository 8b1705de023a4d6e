// Thin wrappers so call sites read like `f64` methods without `std`.

#[inline]
pub(crate) fn pow(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub(crate) fn ln_1p(x: f64) -> f64 {
    libm::log1p(x)
}

#[inline]
pub(crate) fn exp_m1(x: f64) -> f64 {
    libm::expm1(x)
}

#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

/// `(1 + x)^e − 1` without cancellation for small `x`.
#[inline]
pub(crate) fn pow1p_m1(x: f64, e: f64) -> f64 {
    exp_m1(e * ln_1p(x))
}
