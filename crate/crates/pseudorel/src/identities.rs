//! The Pohozaev functional and its sign obstruction, the pointwise commutator identity
//! for `(a² − b²Δ)^s`, and resampling under the parameter rescaling `u(x) = ρ·v(σx)`.

use pseudorel_core::existence::ScalingMap;
use pseudorel_core::nonlinear::power;
use pseudorel_core::quadrature::even_extrapolate_origin;
use pseudorel_core::SymbolParams;
use serde::{Deserialize, Serialize};

use crate::error::IdentityError;
use crate::radial::norms::radial_derivative_times_r;
use crate::radial::{forward, norms, Dim, Multiplier, RadialField, RadialGrid};

/// Samples below this fraction of the peak do not count towards the support.
pub const SUPPORT_FLOOR: f64 = 1e-12;
/// Maps within this many ulps of the identity are applied as the identity.
const IDENTITY_ULPS: f64 = 4.0;

/// Terms of `(N−2s)∫u f(u) − 2N∫F(u) + 2a²s∫u(a²−b²Δ)^{s−1}u` with
/// `f(t) = |t|^{p−1}t − κt`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pohozaev {
    pub value: f64,
    /// `value / ‖u‖²_{H¹}`.
    pub relative: f64,
    /// `∫|u|^{p+1}`.
    pub power_integral: f64,
    /// `∫(κ + a²(a²+b²|ξ|²)^{s−1})|û|²`.
    pub lower_order: f64,
}

/// Evaluates the functional; zero on solutions of `P_c(D)u = |u|^{p−1}u`.
///
/// Integrals use the trapezoid weights of the grid and the matching spectral weights,
/// which are exact for the transform pair. The `κ` terms are folded into the spectral
/// sum so that `κ` and `a^{2s}`, each of size `c^{2s/(1−s)}`, never cancel in
/// floating point.
pub fn pohozaev(u: &RadialField, p: f64, params: &SymbolParams) -> Pohozaev {
    let grid = u.grid();
    let n = grid.dim().as_f64();
    let s = params.s();
    let power_integral: f64 = u
        .values()
        .iter()
        .zip(grid.weights())
        .map(|(v, w)| w * v.abs().powf(p + 1.0))
        .sum();
    let lower_order = forward(u).quadratic_form(|rho| params.lower_order_weight(rho));
    let value = (n - 2.0 * s - 2.0 * n / (p + 1.0)) * power_integral + 2.0 * s * lower_order;
    let h1 = norms(u, 2.0).expect("q = 2 is valid").h1;
    let relative = if h1 > 0.0 { value / (h1 * h1) } else { 0.0 };
    Pohozaev { value, relative, power_integral, lower_order }
}

/// The Pohozaev identity rearranged as
/// `(1/(p+1) − (N−2s)/(2N))∫|u|^{p+1} = (κs/N)∫u² + (a²s/N)∫u(a²−b²Δ)^{s−1}u`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignObstruction {
    /// `1/(p+1) − (N−2s)/(2N)`.
    pub coefficient: f64,
    pub kappa: f64,
}

impl SignObstruction {
    pub fn new(dim: u32, p: f64, params: &SymbolParams) -> Self {
        let n = dim as f64;
        let coefficient = 1.0 / (p + 1.0) - (n - 2.0 * params.s()) / (2.0 * n);
        Self { coefficient, kappa: params.kappa() }
    }

    /// Left side `≤ 0`, right side `> 0` for every `u ≠ 0`: only `u = 0` is left.
    pub fn forbids_solutions(&self) -> bool {
        self.coefficient <= 0.0 && self.kappa >= 0.0
    }
}

/// `(a² − b²Δ)^s` for `s ∈ (0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FractionalOperator {
    pub a2: f64,
    pub b2: f64,
    pub s: f64,
}

impl FractionalOperator {
    pub fn from_params(params: &SymbolParams) -> Self {
        Self { a2: params.a2(), b2: params.b2(), s: params.s() }
    }

    fn power(&self, grid: &RadialGrid, e: f64) -> Multiplier {
        let (a2, b2) = (self.a2, self.b2);
        Multiplier::new(grid, move |rho| (a2 + b2 * rho * rho).powf(e)).expect("finite symbol")
    }
}

/// Both sides of
/// `(a²−b²Δ)^s(x·∇φ) − x·∇((a²−b²Δ)^sφ) = 2s(a²−b²Δ)^sφ − 2a²s(a²−b²Δ)^{s−1}φ`,
/// with `x·∇ = r∂_r` by fourth-order differences. Returns `‖LHS − RHS‖₂ / ‖RHS‖₂`.
pub fn pointwise_identity_check(phi: &RadialField, op: &FractionalOperator) -> f64 {
    let grid = phi.grid();
    let full = op.power(grid, op.s);
    let lower = op.power(grid, op.s - 1.0);
    let r_dphi = radial_derivative_times_r(phi);
    let o_phi = full.apply(phi).expect("same grid");
    let lhs = full
        .apply(&r_dphi)
        .and_then(|a| a.sub(&radial_derivative_times_r(&o_phi)))
        .expect("same grid");
    let rhs = o_phi
        .scaled(2.0 * op.s)
        .sub(&lower.apply(phi).expect("same grid").scaled(2.0 * op.a2 * op.s))
        .expect("same grid");
    lhs.sub(&rhs).expect("same grid").l2() / rhs.l2()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// General solution `v` to normalized `u(x) = ρ·v(σx)`.
    ToNormalized,
    /// Normalized `u` back to `v(y) = u(y/σ)/ρ`.
    FromNormalized,
}

/// Radius beyond which `|f| ≤ SUPPORT_FLOOR·max|f|`.
pub fn effective_support(field: &RadialField) -> f64 {
    let floor = SUPPORT_FLOOR * field.max_abs();
    let grid = field.grid();
    field
        .values()
        .iter()
        .rposition(|v| v.abs() > floor)
        .map_or(0.0, |i| grid.node(i))
}

/// Samples at `r = j·h`, `j = 0..=K`, extended evenly to negative `j` and by zero
/// beyond `R`.
struct Interpolant {
    h: f64,
    ext: Vec<f64>,
}

impl Interpolant {
    fn new(field: &RadialField) -> Self {
        let v = field.values();
        let ext = match field.grid().dim() {
            Dim::One => {
                let mut e = v.to_vec();
                e.push(0.0);
                e
            }
            Dim::Three => {
                let mut e = Vec::with_capacity(v.len() + 1);
                e.push(even_extrapolate_origin(v[0], v[1], v[2]));
                e.extend_from_slice(v);
                e
            }
        };
        Self { h: field.grid().spacing(), ext }
    }

    fn sample(&self, j: i64) -> f64 {
        let j = j.unsigned_abs() as usize;
        self.ext.get(j).copied().unwrap_or(0.0)
    }

    /// Four-point Lagrange interpolation.
    fn eval(&self, r: f64) -> f64 {
        let x = r / self.h;
        let j = x.floor();
        let t = x - j;
        let j = j as i64;
        let (f0, f1, f2, f3) = (self.sample(j - 1), self.sample(j), self.sample(j + 1), self.sample(j + 2));
        -t * (t - 1.0) * (t - 2.0) / 6.0 * f0 + (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0 * f1
            - (t + 1.0) * t * (t - 2.0) / 2.0 * f2
            + (t + 1.0) * t * (t - 1.0) / 6.0 * f3
    }
}

fn is_identity(map: &ScalingMap) -> bool {
    map.is_identity(IDENTITY_ULPS * f64::EPSILON)
}

/// Resamples `field` onto `target` under the rescaling by cubic interpolation.
/// The identity map returns the field unchanged.
pub fn scale(
    field: &RadialField,
    map: &ScalingMap,
    direction: Direction,
    target: &RadialGrid,
) -> Result<RadialField, IdentityError> {
    if target.dim() != field.grid().dim() {
        return Err(crate::error::GridError::Mismatch.into());
    }
    if is_identity(map) && target == field.grid() {
        return Ok(field.clone());
    }
    let (amplitude, dilation) = match direction {
        Direction::ToNormalized => (map.rho, map.sigma),
        Direction::FromNormalized => (1.0 / map.rho, 1.0 / map.sigma),
    };
    let support = effective_support(field) / dilation;
    if support > target.radius() {
        return Err(IdentityError::SupportOverflow { support, radius: target.radius() });
    }
    let interp = Interpolant::new(field);
    Ok(RadialField::from_fn(target, |r| amplitude * interp.eval(dilation * r))?)
}

/// `‖P̃(D)v − |v|^{p−1}v‖₂ / ‖v‖₂` for the symbol of `params`, normalized or not.
pub fn equation_residual(v: &RadialField, params: &SymbolParams, p: f64) -> f64 {
    let lhs = Multiplier::new(v.grid(), |rho| params.p_c(rho))
        .and_then(|m| m.apply(v))
        .expect("finite symbol on the grid");
    let rhs = v.map(|x| power(x, p));
    lhs.sub(&rhs).expect("same grid").l2() / v.l2()
}
