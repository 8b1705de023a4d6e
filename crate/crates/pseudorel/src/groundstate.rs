//! The limit ground state `u_∞ > 0` of `P_∞(D)u = u^p`, i.e. `−Δu + u = u^p`.

use pseudorel_core::existence::local_critical_exponent;
use pseudorel_core::nonlinear::power;
use serde::{Deserialize, Serialize};

use crate::error::GroundStateError;
use crate::radial::{forward, inverse, Dim, Multiplier, RadialField, RadialGrid, SpectralField};

pub const DEFAULT_TOL: f64 = 1e-13;
pub const DEFAULT_MAX_ITER: usize = 500;

/// Samples below this fraction of the peak are rounding-level and excluded from the
/// shape checks.
const SHAPE_FLOOR: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Petviashvili,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroundState {
    pub field: RadialField,
    pub p: f64,
    /// `‖P_∞(D)u − u^p‖₂ / ‖u‖₂`.
    pub residual: f64,
    pub method: Method,
    pub iterations: usize,
    /// Petviashvili stabilizing factor `M` at the returned field; `1` at an exact solution.
    pub stabilizer: f64,
}

impl GroundState {
    pub fn grid(&self) -> &RadialGrid {
        self.field.grid()
    }

    /// Positive and non-increasing on every node above the rounding floor.
    pub fn is_positive_decreasing(&self) -> bool {
        let v = self.field.values();
        let floor = SHAPE_FLOOR * self.field.max_abs();
        let head = v.iter().take_while(|x| **x > floor).count();
        head > 0
            && v[head..].iter().all(|x| x.abs() <= floor)
            && v[..head].windows(2).all(|w| w[1] <= w[0])
    }
}

fn check_exponent(p: f64, dim: Dim) -> Result<(), GroundStateError> {
    let max = local_critical_exponent(dim.as_u32());
    if p > 1.0 && p < max {
        Ok(())
    } else {
        Err(GroundStateError::ExponentOutOfRange { p, dim: dim.as_u32(), max })
    }
}

fn p_inf(grid: &RadialGrid) -> Multiplier {
    Multiplier::new(grid, |rho| rho * rho + 1.0).expect("P_inf is finite on the grid")
}

/// `‖P_∞(D)u − |u|^{p−1}u‖₂ / ‖u‖₂`.
pub fn limit_residual(field: &RadialField, p: f64) -> f64 {
    let lhs = p_inf(field.grid()).apply(field).expect("same grid");
    let rhs = field.map(|v| power(v, p));
    lhs.sub(&rhs).expect("same grid").l2() / field.l2()
}

fn stabilizer(v: &SpectralField, nonlinear: &SpectralField, symbol: &[f64], weights: &[f64]) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for k in 0..symbol.len() {
        num += weights[k] * symbol[k] * v.coeffs()[k] * v.coeffs()[k];
        den += weights[k] * nonlinear.coeffs()[k] * v.coeffs()[k];
    }
    num / den
}

/// `u(x) = ((p+1)/2)^{1/(p−1)} sech^{2/(p−1)}((p−1)x/2)`.
pub fn closed_form_1d(p: f64, grid: &RadialGrid) -> Result<GroundState, GroundStateError> {
    if grid.dim() != Dim::One {
        return Err(GroundStateError::DimMismatch(grid.dim().as_u32()));
    }
    check_exponent(p, Dim::One)?;
    let amp = ((p + 1.0) / 2.0).powf(1.0 / (p - 1.0));
    let field = RadialField::from_fn(grid, |x| amp * (1.0 / ((p - 1.0) * x / 2.0).cosh()).powf(2.0 / (p - 1.0)))
        .expect("closed form is finite");
    let symbol = p_inf(grid);
    let v = forward(&field);
    let nl = forward(&field.map(|x| power(x, p)));
    let m = stabilizer(&v, &nl, symbol.symbol(), &grid.spectral_weights());
    Ok(GroundState {
        residual: limit_residual(&field, p),
        field,
        p,
        method: Method::ClosedForm,
        iterations: 0,
        stabilizer: m,
    })
}

fn iterate(
    p: f64,
    grid: &RadialGrid,
    seed_amplitude: f64,
    tol: f64,
    max_iter: usize,
) -> Option<GroundState> {
    let gamma = p / (p - 1.0);
    let symbol = p_inf(grid);
    let sym = symbol.symbol();
    let weights = grid.spectral_weights();
    let mut v = RadialField::from_fn(grid, |r| seed_amplitude * (-r * r / 2.0).exp()).ok()?;
    for it in 1..=max_iter {
        let vhat = forward(&v);
        let nl = forward(&v.map(|x| power(x, p)));
        let m = stabilizer(&vhat, &nl, sym, &weights);
        if !(m.is_finite() && m > 0.0) {
            return None;
        }
        let scale = m.powf(gamma);
        let coeffs = nl.coeffs().iter().zip(sym).map(|(n, s)| scale * n / s).collect();
        let next = inverse(&SpectralField::new(grid, coeffs).ok()?);
        let step = next.sub(&v).ok()?.l2();
        v = next;
        if !step.is_finite() {
            return None;
        }
        if step < tol {
            let vhat = forward(&v);
            let nl = forward(&v.map(|x| power(x, p)));
            return Some(GroundState {
                residual: limit_residual(&v, p),
                stabilizer: stabilizer(&vhat, &nl, sym, &weights),
                field: v,
                p,
                method: Method::Petviashvili,
                iterations: it,
            });
        }
    }
    None
}

/// Petviashvili iteration `v ← M^γ P_∞(D)^{−1}[v^p]`, `γ = p/(p−1)`, from a unit
/// Gaussian; one retry from a doubled seed before giving up.
pub fn petviashvili(
    p: f64,
    grid: &RadialGrid,
    tol: f64,
    max_iter: usize,
) -> Result<GroundState, GroundStateError> {
    check_exponent(p, grid.dim())?;
    if !(tol > 0.0) {
        return Err(GroundStateError::BadTolerance(tol));
    }
    iterate(p, grid, 1.0, tol, max_iter)
        .or_else(|| iterate(p, grid, 2.0, tol, max_iter))
        .ok_or(GroundStateError::NoConvergence(max_iter))
}

/// Closed form in one dimension, Petviashvili otherwise.
pub fn ground_state(p: f64, grid: &RadialGrid, tol: f64) -> Result<GroundState, GroundStateError> {
    match grid.dim() {
        Dim::One => closed_form_1d(p, grid),
        Dim::Three => petviashvili(p, grid, tol, DEFAULT_MAX_ITER),
    }
}
