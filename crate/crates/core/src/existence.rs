//! Existence regimes for ground states and the rescaling between general and
//! normalized parameters.

use core::fmt;

use crate::math::{pow, sqrt};
use crate::symbols::{ParamError, SymbolParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExistenceRegime {
    /// No nontrivial finite-energy solution: `κ ≥ 0` and `p` at or above the
    /// fractional critical exponent.
    Nonexistence,
    /// Ground states exist and converge to the limit profile once `c` is large.
    LargeC,
    /// Neither result applies.
    Open,
}

impl ExistenceRegime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Nonexistence => "nonexistence",
            Self::LargeC => "large_c",
            Self::Open => "open",
        }
    }
}

impl fmt::Display for ExistenceRegime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExistenceError {
    Param(ParamError),
    ZeroDimension,
    ExponentNotSuperlinear(f64),
}

impl From<ParamError> for ExistenceError {
    fn from(e: ParamError) -> Self {
        Self::Param(e)
    }
}

impl core::error::Error for ExistenceError {}

impl fmt::Display for ExistenceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Param(e) => e.fmt(f),
            Self::ZeroDimension => f.write_str("dimension must be at least 1"),
            Self::ExponentNotSuperlinear(p) => write!(f, "exponent p = {p} must exceed 1"),
        }
    }
}

/// `(N + 2s)/(N − 2s)`, or `+∞` when `N ≤ 2s`.
pub fn fractional_critical_exponent(dim: u32, s: f64) -> f64 {
    let n = dim as f64;
    if n > 2.0 * s {
        (n + 2.0 * s) / (n - 2.0 * s)
    } else {
        f64::INFINITY
    }
}

/// `(N + 2)/(N − 2)`, or `+∞` for `N ≤ 2`.
pub fn local_critical_exponent(dim: u32) -> f64 {
    if dim > 2 {
        (dim as f64 + 2.0) / (dim as f64 - 2.0)
    } else {
        f64::INFINITY
    }
}

/// Classifies `(N, s, p, m, μ, c)`. The nonexistence test takes precedence.
pub fn classify_existence(
    dim: u32,
    s: f64,
    p: f64,
    mass: f64,
    shift: f64,
    c: f64,
) -> Result<ExistenceRegime, ExistenceError> {
    if dim == 0 {
        return Err(ExistenceError::ZeroDimension);
    }
    if !(p > 1.0) {
        return Err(ExistenceError::ExponentNotSuperlinear(p));
    }
    let params = SymbolParams::general(s, c, mass, shift)?;
    if params.kappa() >= 0.0 && p >= fractional_critical_exponent(dim, s) {
        Ok(ExistenceRegime::Nonexistence)
    } else if p < local_critical_exponent(dim) {
        Ok(ExistenceRegime::LargeC)
    } else {
        Ok(ExistenceRegime::Open)
    }
}

/// Maps a solution `v` of the general problem at light speed `c̃` onto a solution
/// `u(x) = ρ·v(σx)` of the normalized problem at light speed `c`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalingMap {
    pub s: f64,
    pub p: f64,
    pub mass: f64,
    pub shift: f64,
    /// Amplitude factor `μ^{1/(1−p)}`.
    pub rho: f64,
    /// Length factor `√(s/(μ m^{2(1−s)}))`.
    pub sigma: f64,
}

impl ScalingMap {
    pub fn new(s: f64, p: f64, mass: f64, shift: f64) -> Result<Self, ExistenceError> {
        // Validates s, m, μ.
        SymbolParams::general(s, 1.0, mass, shift)?;
        if !(p > 1.0) {
            return Err(ExistenceError::ExponentNotSuperlinear(p));
        }
        let rho = pow(shift, 1.0 / (1.0 - p));
        let sigma = sqrt(s / (shift * pow(mass, 2.0 * (1.0 - s))));
        Ok(Self { s, p, mass, shift, rho, sigma })
    }

    fn speed_factor(&self) -> f64 {
        sqrt(self.s) * pow(self.shift, (1.0 - self.s) / (2.0 * self.s))
            * pow(self.mass, -(1.0 - self.s))
    }

    /// General light speed `c̃` paired with the normalized light speed `c`.
    pub fn general_speed(&self, c: f64) -> f64 {
        self.speed_factor() * c
    }

    pub fn normalized_speed(&self, c_general: f64) -> f64 {
        c_general / self.speed_factor()
    }

    /// `u(x) = ρ·v(σx)`.
    pub fn to_normalized(&self, v_at_sigma_x: f64) -> f64 {
        self.rho * v_at_sigma_x
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        (self.rho - 1.0).abs() <= tol
            && (self.sigma - 1.0).abs() <= tol
            && (self.speed_factor() - 1.0).abs() <= tol
    }
}
