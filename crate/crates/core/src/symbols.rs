//! Symbols of the limit and pseudorelativistic operators, and their pointwise bounds.
//!
//! With `t = c²ξ²/a²` the symbol factors as `P_c(ξ) = a^{2s}·((1 + t)^s − 1) + μ`. Every
//! quantity below is evaluated from that factorization with `expm1`/`log1p` or a
//! binomial series, so that `P_c(0) = 1` holds exactly and the difference `P_c − P_∞`,
//! which is `O(t²)` while each term is `O(1)`, keeps full relative precision.
//!
//! All bound checks report a *relative slack* `(bound − quantity)/scale`; a sample is a
//! violation when the slack falls below `−REL_TOL`.

use core::fmt;

use crate::math::{self, pow, pow1p_m1, sqrt};
use crate::series::{binomial_remainder2, binomial_remainder3};

/// Relative tolerance applied to every pointwise bound.
pub const REL_TOL: f64 = 1e-12;

/// Smallest light speed for which the bound lemmas are asserted.
pub const MIN_BOUND_SPEED: f64 = 2.0;

/// Light speeds of the calibration sweep for the decay constants.
pub const CALIBRATION_SPEEDS: [f64; 3] = [2.0, 10.0, 100.0];
/// Frequency window and resolution of the calibration sweep.
pub const CALIBRATION_XI: (f64, f64, usize) = (1e-3, 1e6, 241);
/// Safety margin on the calibrated decay ratios.
pub const CALIBRATION_MARGIN: f64 = 1.05;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ParamError {
    OrderOutOfRange(f64),
    NonPositiveSpeed(f64),
    NonPositiveMass(f64),
    NonPositiveShift(f64),
    /// `a² = m²c^{2/(1−s)}` over- or underflows `f64`.
    ScaleOutOfRange { s: f64, c: f64 },
}

impl core::error::Error for ParamError {}

impl fmt::Display for ParamError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::OrderOutOfRange(s) => write!(f, "fractional order s = {s} is outside (1/2, 1)"),
            Self::NonPositiveSpeed(c) => write!(f, "light speed c = {c} must be positive"),
            Self::NonPositiveMass(m) => write!(f, "mass m = {m} must be positive"),
            Self::NonPositiveShift(mu) => write!(f, "frequency shift mu = {mu} must be positive"),
            Self::ScaleOutOfRange { s, c } => {
                write!(f, "a^2 = m^2 c^(2/(1-s)) is not representable for s = {s}, c = {c}")
            }
        }
    }
}

/// How the mass and frequency shift are fixed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Normalization {
    /// `m = s^{1/(2−2s)}`, `μ = 1`.
    Normalized,
    General { mass: f64, shift: f64 },
}

/// Fractional order `s`, light speed `c`, and the mass/shift normalization.
///
/// The derived constants `a² = m²c^{2/(1−s)}` and `a^{2s}` are computed once at
/// construction and cannot be set independently.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymbolParams {
    s: f64,
    c: f64,
    normalization: Normalization,
    a2: f64,
    rest: f64,
}

impl SymbolParams {
    pub fn normalized(s: f64, c: f64) -> Result<Self, ParamError> {
        Self::build(s, c, Normalization::Normalized)
    }

    pub fn general(s: f64, c: f64, mass: f64, shift: f64) -> Result<Self, ParamError> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(ParamError::NonPositiveMass(mass));
        }
        if !(shift > 0.0 && shift.is_finite()) {
            return Err(ParamError::NonPositiveShift(shift));
        }
        Self::build(s, c, Normalization::General { mass, shift })
    }

    fn build(s: f64, c: f64, normalization: Normalization) -> Result<Self, ParamError> {
        if !(s > 0.5 && s < 1.0) {
            return Err(ParamError::OrderOutOfRange(s));
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(ParamError::NonPositiveSpeed(c));
        }
        let log_a2 = match normalization {
            // a² = s^{1/(1−s)} c^{2/(1−s)}
            Normalization::Normalized => (math::ln(s) + 2.0 * math::ln(c)) / (1.0 - s),
            Normalization::General { mass, .. } => {
                2.0 * math::ln(mass) + 2.0 * math::ln(c) / (1.0 - s)
            }
        };
        let a2 = libm::exp(log_a2);
        let rest = libm::exp(s * log_a2);
        if !(a2.is_finite() && rest.is_finite() && a2 > 0.0) {
            return Err(ParamError::ScaleOutOfRange { s, c });
        }
        Ok(Self { s, c, normalization, a2, rest })
    }

    /// Same order and normalization at a different light speed.
    pub fn with_speed(&self, c: f64) -> Result<Self, ParamError> {
        Self::build(self.s, c, self.normalization)
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn is_normalized(&self) -> bool {
        matches!(self.normalization, Normalization::Normalized)
    }

    pub fn mass(&self) -> f64 {
        match self.normalization {
            Normalization::Normalized => pow(self.s, 1.0 / (2.0 - 2.0 * self.s)),
            Normalization::General { mass, .. } => mass,
        }
    }

    pub fn shift(&self) -> f64 {
        match self.normalization {
            Normalization::Normalized => 1.0,
            Normalization::General { shift, .. } => shift,
        }
    }

    /// `a² = m² c^{2/(1−s)}`.
    pub fn a2(&self) -> f64 {
        self.a2
    }

    /// `b² = c²`.
    pub fn b2(&self) -> f64 {
        self.c * self.c
    }

    /// `a^{2s} = m^{2s} c^{2s/(1−s)}`, the subtracted rest energy.
    pub fn rest_energy(&self) -> f64 {
        self.rest
    }

    /// `κ = μ − m^{2s} c^{2s/(1−s)}`.
    pub fn kappa(&self) -> f64 {
        self.shift() - self.rest
    }

    /// Dimensionless frequency `t = c²ξ²/a²`.
    pub fn stretch(&self, xi: f64) -> f64 {
        self.c * self.c * xi * xi / self.a2
    }

    pub fn p_c(&self, xi: f64) -> f64 {
        let t = self.stretch(xi);
        if t < Self::LIMIT_BRANCH {
            // Near the limit symbol, P_∞ + (P_c − P_∞) keeps P_c ≤ P_∞ to the last bit.
            p_inf(xi) + self.diff(xi)
        } else {
            self.rest * pow1p_m1(t, self.s) + self.shift()
        }
    }

    const LIMIT_BRANCH: f64 = 0.25;

    /// `P_c(ξ) − P_∞(ξ)`, never formed by subtracting the two symbols.
    pub fn diff(&self, xi: f64) -> f64 {
        let t = self.stretch(xi);
        let remainder = self.rest * binomial_remainder2(t, self.s);
        match self.normalization {
            Normalization::Normalized => remainder,
            Normalization::General { mass, shift } => {
                // a^{2s}·s·t = s·m^{2s−2}·ξ², which is exactly ξ² only when normalized.
                let linear = self.s * pow(mass, 2.0 * self.s - 2.0);
                remainder + (linear - 1.0) * xi * xi + (shift - 1.0)
            }
        }
    }

    /// `κ + a²(a² + b²ξ²)^{s−1} = μ + a^{2s}((1 + t)^{s−1} − 1)`, the weight of the
    /// lower-order term in the Pohozaev functional.
    pub fn lower_order_weight(&self, xi: f64) -> f64 {
        self.shift() + self.rest * pow1p_m1(self.stretch(xi), self.s - 1.0)
    }

    /// `1/P_∞(ξ) − 1/P_c(ξ)`.
    pub fn multiplier_gap(&self, xi: f64) -> f64 {
        self.diff(xi) / (self.p_c(xi) * p_inf(xi))
    }

    /// Radial derivative of [`Self::multiplier_gap`], in cancellation-free form.
    ///
    /// Normalized parameters only.
    pub fn multiplier_gap_derivative(&self, xi: f64) -> f64 {
        let t = self.stretch(xi);
        let pinf = p_inf(xi);
        let pc = self.p_c(xi);
        let diff = self.diff(xi);
        let e = pow1p_m1(t, self.s - 1.0);
        let h = binomial_remainder3(t, self.s);
        let numerator = pinf * (e + self.rest * h) - diff * diff;
        2.0 * xi * numerator / (pc * pc * pinf * pinf)
    }

    /// The same derivative assembled by the Leibniz rule from the closed-form partial
    /// derivatives of each factor. Loses digits once `ξ ≫ 1` with `t ≪ 1`; kept as
    /// an independent route for cross-checking.
    pub fn multiplier_gap_derivative_leibniz(&self, xi: f64) -> f64 {
        let c2 = self.c * self.c;
        let inner = c2 * xi * xi + self.a2;
        let dpc = 2.0 * self.s * c2 * xi * pow(inner, self.s - 1.0);
        let dpinf = 2.0 * xi;
        let pc = self.p_c(xi);
        let pinf = p_inf(xi);
        let gap = self.multiplier_gap(xi);
        (dpc - dpinf) / (pc * pinf) - dpc / pc * gap - dpinf / pinf * gap
    }

    /// `P_c(ξ)/P_∞(ξ)`.
    pub fn symbol_ratio(&self, xi: f64) -> f64 {
        self.p_c(xi) / p_inf(xi)
    }

    /// `min{c^{−2s/(1−s)}, c^{−2s²/(1−s)}(ξ²+1)^{−(1−s)}}`.
    pub fn decay_envelope(&self, xi: f64) -> f64 {
        let s = self.s;
        let first = pow(self.c, -2.0 * s / (1.0 - s));
        let second = pow(self.c, -2.0 * s * s / (1.0 - s)) * pow(xi * xi + 1.0, -(1.0 - s));
        first.min(second)
    }

    /// Bound `s(1−s)/(2 s^{(2−s)/(1−s)}) · ξ⁴ · c^{−2s/(1−s)}` on `|P_c − P_∞|`.
    pub fn diff_bound(&self, xi: f64) -> f64 {
        let s = self.s;
        let coefficient = s * (1.0 - s) / (2.0 * pow(s, (2.0 - s) / (1.0 - s)));
        coefficient * xi * xi * xi * xi * pow(self.c, -2.0 * s / (1.0 - s))
    }
}

/// `P_∞(ξ) = ξ² + 1`.
pub fn p_inf(xi: f64) -> f64 {
    xi * xi + 1.0
}

pub fn p_c(xi: f64, params: &SymbolParams) -> f64 {
    params.p_c(xi)
}

/// Frequency separating the quadratic regime from the `|ξ|^{2s}` regime:
/// `c^{s/(1−s)} √((2^{1/(1−s)} − 1) s^{1/(1−s)})`.
pub fn xi_star(params: &SymbolParams) -> f64 {
    let s = params.s;
    let width = (pow(2.0, 1.0 / (1.0 - s)) - 1.0) * pow(s, 1.0 / (1.0 - s));
    pow(params.c, s / (1.0 - s)) * sqrt(width)
}

/// `(1 + 1/(2^{1/(1−s)} − 1))^s − (2^{1/(1−s)} − 1)^{−s}`, the lower constant of the
/// high-frequency bracket.
pub fn high_bracket_constant(s: f64) -> f64 {
    let q = pow(2.0, 1.0 / (1.0 - s)) - 1.0;
    pow(1.0 + 1.0 / q, s) - pow(q, -s)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundViolation {
    pub xi: f64,
    pub value: f64,
    pub lower: Option<f64>,
    pub upper: f64,
    pub rel_slack: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BoundError {
    Violation(BoundViolation),
    OutOfRegime { xi: f64, xi_star: f64 },
    SpeedBelowBoundRange(f64),
    NotNormalized,
    InvalidFrequency(f64),
}

impl core::error::Error for BoundError {}

impl fmt::Display for BoundError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Violation(v) => write!(
                f,
                "bound violated at xi = {}: value {} outside [{:?}, {}] (relative slack {})",
                v.xi, v.value, v.lower, v.upper, v.rel_slack
            ),
            Self::OutOfRegime { xi, xi_star } => {
                write!(f, "xi = {xi} is on the wrong side of the crossover {xi_star}")
            }
            Self::SpeedBelowBoundRange(c) => write!(f, "bounds are asserted for c >= 2, got {c}"),
            Self::NotNormalized => f.write_str("bounds require normalized parameters"),
            Self::InvalidFrequency(xi) => write!(f, "invalid frequency {xi}"),
        }
    }
}

fn bracket(xi: f64, value: f64, lower: Option<f64>, upper: f64) -> Result<f64, BoundError> {
    let scale = upper.abs().max(value.abs()).max(lower.map_or(0.0, f64::abs));
    let mut slack = upper - value;
    if let Some(lo) = lower {
        slack = slack.min(value - lo);
    }
    let rel_slack = if scale > 0.0 { slack / scale } else { 0.0 };
    if rel_slack < -REL_TOL {
        Err(BoundError::Violation(BoundViolation { xi, value, lower, upper, rel_slack }))
    } else {
        Ok(rel_slack)
    }
}

fn require_normalized(params: &SymbolParams) -> Result<(), BoundError> {
    if params.is_normalized() {
        Ok(())
    } else {
        Err(BoundError::NotNormalized)
    }
}

fn require_bound_speed(params: &SymbolParams) -> Result<(), BoundError> {
    if params.c >= MIN_BOUND_SPEED {
        Ok(())
    } else {
        Err(BoundError::SpeedBelowBoundRange(params.c))
    }
}

fn require_frequency(xi: f64) -> Result<(), BoundError> {
    if xi >= 0.0 && xi.is_finite() {
        Ok(())
    } else {
        Err(BoundError::InvalidFrequency(xi))
    }
}

/// `(ξ²+1)/2 ≤ P_c(ξ) ≤ ξ² + 1` for `ξ ≤ ξ*`.
///
/// The upper bound is `ξ² + 1`, not `ξ²`: the Taylor argument gives `P_c − 1 ≤ ξ²`,
/// and `P_c(1)` already exceeds `1` for every admissible `(s, c)`.
pub fn check_low_bracket(xi: f64, params: &SymbolParams) -> Result<f64, BoundError> {
    require_frequency(xi)?;
    require_normalized(params)?;
    require_bound_speed(params)?;
    let star = xi_star(params);
    if xi > star {
        return Err(BoundError::OutOfRegime { xi, xi_star: star });
    }
    let value = params.p_c(xi);
    bracket(xi, value, Some(p_inf(xi) / 2.0), p_inf(xi))
}

/// `K_s c^{2s}ξ^{2s} + 1 ≤ P_c(ξ) ≤ c^{2s}ξ^{2s} + 1` for `ξ ≥ ξ*`.
pub fn check_high_bracket(xi: f64, params: &SymbolParams) -> Result<f64, BoundError> {
    require_frequency(xi)?;
    require_normalized(params)?;
    require_bound_speed(params)?;
    let star = xi_star(params);
    if xi < star {
        return Err(BoundError::OutOfRegime { xi, xi_star: star });
    }
    let s = params.s;
    let scaled = pow(params.c * xi, 2.0 * s);
    let value = params.p_c(xi);
    bracket(xi, value, Some(high_bracket_constant(s) * scaled + 1.0), scaled + 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiffBound {
    /// Signed `P_c − P_∞`; never positive.
    pub difference: f64,
    pub bound: f64,
    pub rel_slack: f64,
}

/// `P_c − P_∞` together with its quartic bound; errors if `|P_c − P_∞|` exceeds it.
pub fn diff_and_bound(xi: f64, params: &SymbolParams) -> Result<DiffBound, BoundError> {
    require_frequency(xi)?;
    require_normalized(params)?;
    require_bound_speed(params)?;
    let difference = params.diff(xi);
    let bound = params.diff_bound(xi);
    let rel_slack = bracket(xi, difference.abs(), None, bound)?;
    Ok(DiffBound { difference, bound, rel_slack })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecayOrder {
    Zero,
    One,
}

/// Frozen constants for the multiplier decay bounds, one pair per fractional order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayConstants {
    pub s: f64,
    pub order0: f64,
    pub order1: f64,
}

impl DecayConstants {
    /// Largest observed ratio on the fixed calibration sweep, times [`CALIBRATION_MARGIN`].
    pub fn calibrate(s: f64) -> Result<Self, ParamError> {
        let (lo, hi, n) = CALIBRATION_XI;
        let mut order0: f64 = 0.0;
        let mut order1: f64 = 0.0;
        for &c in &CALIBRATION_SPEEDS {
            let params = SymbolParams::normalized(s, c)?;
            for xi in log_spaced(lo, hi, n) {
                let env = params.decay_envelope(xi);
                order0 = order0.max(params.multiplier_gap(xi).abs() / env);
                order1 = order1.max(xi * params.multiplier_gap_derivative(xi).abs() / env);
            }
        }
        Ok(Self { s, order0: CALIBRATION_MARGIN * order0, order1: CALIBRATION_MARGIN * order1 })
    }
}

/// Decay of `𝔞 = 1/P_∞ − 1/P_c` (order 0, together with `P_c/P_∞ ≤ 1`) or of its radial
/// derivative (order 1, scaled by `ξ`) against the frozen constants.
pub fn check_multiplier_decay(
    xi: f64,
    params: &SymbolParams,
    order: DecayOrder,
    constants: &DecayConstants,
) -> Result<f64, BoundError> {
    require_frequency(xi)?;
    require_normalized(params)?;
    require_bound_speed(params)?;
    let env = params.decay_envelope(xi);
    match order {
        DecayOrder::Zero => {
            let gap = bracket(xi, params.multiplier_gap(xi).abs(), None, constants.order0 * env)?;
            let ratio = bracket(xi, params.symbol_ratio(xi), Some(0.0), 1.0)?;
            Ok(gap.min(ratio))
        }
        DecayOrder::One => {
            if xi <= 0.0 {
                return Err(BoundError::InvalidFrequency(xi));
            }
            let scaled = xi * params.multiplier_gap_derivative(xi).abs();
            bracket(xi, scaled, None, constants.order1 * env)
        }
    }
}

/// Aggregate of one bound check over a sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundReport {
    pub samples: usize,
    pub violations: usize,
    /// Minimum relative slack; `+∞` before any sample.
    pub worst_slack: f64,
    pub worst_xi: f64,
}

impl Default for BoundReport {
    fn default() -> Self {
        Self { samples: 0, violations: 0, worst_slack: f64::INFINITY, worst_xi: f64::NAN }
    }
}

impl BoundReport {
    /// Records a check outcome. Out-of-regime and precondition errors are not samples.
    pub fn record(&mut self, xi: f64, outcome: &Result<f64, BoundError>) {
        let slack = match outcome {
            Ok(slack) => *slack,
            Err(BoundError::Violation(v)) => {
                self.violations += 1;
                v.rel_slack
            }
            Err(_) => return,
        };
        self.samples += 1;
        if slack < self.worst_slack {
            self.worst_slack = slack;
            self.worst_xi = xi;
        }
    }

    pub fn merge(&mut self, other: &BoundReport) {
        self.samples += other.samples;
        self.violations += other.violations;
        if other.worst_slack < self.worst_slack {
            self.worst_slack = other.worst_slack;
            self.worst_xi = other.worst_xi;
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Per-check reports of one `(s, c)` sweep.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SweepSummary {
    pub low: BoundReport,
    pub high: BoundReport,
    pub diff: BoundReport,
    pub decay0: BoundReport,
    pub decay1: BoundReport,
}

impl SweepSummary {
    pub fn merge(&mut self, other: &SweepSummary) {
        self.low.merge(&other.low);
        self.high.merge(&other.high);
        self.diff.merge(&other.diff);
        self.decay0.merge(&other.decay0);
        self.decay1.merge(&other.decay1);
    }

    pub fn violations(&self) -> usize {
        self.low.violations
            + self.high.violations
            + self.diff.violations
            + self.decay0.violations
            + self.decay1.violations
    }
}

/// Every quantity of one sweep row. Bracket flags are `None` outside their regime.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymbolSample {
    pub xi: f64,
    pub p_c: f64,
    pub p_inf: f64,
    pub diff: f64,
    pub diff_bound: f64,
    pub low: Option<Result<f64, BoundError>>,
    pub high: Option<Result<f64, BoundError>>,
    pub diff_check: Result<f64, BoundError>,
    pub decay0: Result<f64, BoundError>,
    pub decay1: Option<Result<f64, BoundError>>,
}

impl SymbolSample {
    pub fn evaluate(xi: f64, params: &SymbolParams, constants: &DecayConstants) -> Self {
        let star = xi_star(params);
        Self {
            xi,
            p_c: params.p_c(xi),
            p_inf: p_inf(xi),
            diff: params.diff(xi),
            diff_bound: params.diff_bound(xi),
            low: (xi <= star).then(|| check_low_bracket(xi, params)),
            high: (xi >= star).then(|| check_high_bracket(xi, params)),
            diff_check: diff_and_bound(xi, params).map(|d| d.rel_slack),
            decay0: check_multiplier_decay(xi, params, DecayOrder::Zero, constants),
            decay1: (xi > 0.0)
                .then(|| check_multiplier_decay(xi, params, DecayOrder::One, constants)),
        }
    }
}

/// Runs every bound over `samples` log-spaced frequencies in `[xi_min, xi_max]`.
pub fn sweep(
    params: &SymbolParams,
    xi_min: f64,
    xi_max: f64,
    samples: usize,
    constants: &DecayConstants,
) -> SweepSummary {
    let mut summary = SweepSummary::default();
    for xi in log_spaced(xi_min, xi_max, samples) {
        let sample = SymbolSample::evaluate(xi, params, constants);
        if let Some(low) = &sample.low {
            summary.low.record(xi, low);
        }
        if let Some(high) = &sample.high {
            summary.high.record(xi, high);
        }
        summary.diff.record(xi, &sample.diff_check);
        summary.decay0.record(xi, &sample.decay0);
        if let Some(d1) = &sample.decay1 {
            summary.decay1.record(xi, d1);
        }
    }
    summary
}

/// `n` points geometrically spaced from `min` to `max` inclusive.
pub fn log_spaced(min: f64, max: f64, n: usize) -> impl Iterator<Item = f64> {
    let (lo, hi) = (math::ln(min), math::ln(max));
    (0..n).map(move |i| {
        if i == 0 {
            min
        } else if i + 1 == n {
            max
        } else {
            libm::exp(lo + (hi - lo) * i as f64 / (n - 1) as f64)
        }
    })
}
