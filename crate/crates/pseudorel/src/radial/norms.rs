//! Lebesgue and Sobolev norms of radial fields.
//!
//! Integrals use composite Simpson on the `K + 1` equispaced points `r = 0, h, …, R`
//! with the radial measure `2 dr` (`N = 1`, by evenness) or `4πr² dr` (`N = 3`).
//! For `N = 1` the endpoint sample is the Dirichlet zero; for `N = 3` the origin is
//! filled by even extrapolation. Gradients are fourth-order differences.

use std::f64::consts::PI;

use pseudorel_core::quadrature::{derivative_4th, even_extrapolate_origin, simpson_weights, Parity};
use serde::{Deserialize, Serialize};

use crate::error::NormError;

use super::field::RadialField;
use super::grid::{Dim, RadialGrid};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Norms {
    pub l2: f64,
    pub lq: f64,
    pub h1: f64,
    pub w1q: f64,
    /// `max(H¹, W^{1,q})`.
    pub intersection: f64,
}

/// Samples at `r = i·h`, `i = 0..=K`.
fn extended(field: &RadialField) -> Vec<f64> {
    let v = field.values();
    match field.grid().dim() {
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
    }
}

fn restrict(grid: &RadialGrid, ext: Vec<f64>) -> RadialField {
    let values = match grid.dim() {
        Dim::One => ext[..grid.points()].to_vec(),
        Dim::Three => ext[1..].to_vec(),
    };
    RadialField::from_parts(grid, values)
}

/// Simpson weights times the radial measure on the extended points.
fn measure_weights(grid: &RadialGrid) -> Vec<f64> {
    let h = grid.spacing();
    let mut w = simpson_weights(grid.points() + 1, h);
    for (i, wi) in w.iter_mut().enumerate() {
        let r = i as f64 * h;
        *wi *= match grid.dim() {
            Dim::One => 2.0,
            Dim::Three => 4.0 * PI * r * r,
        };
    }
    w
}

fn integrate_power(grid: &RadialGrid, ext: &[f64], q: f64) -> f64 {
    let w = measure_weights(grid);
    let sum: f64 = ext.iter().zip(&w).map(|(v, w)| w * v.abs().powf(q)).sum();
    sum.powf(1.0 / q)
}

fn gradient_ext(grid: &RadialGrid, ext: &[f64], parity: Parity) -> Vec<f64> {
    derivative_4th(ext, grid.spacing(), parity)
}

/// `u′(r)` at the grid nodes.
pub fn derivative(field: &RadialField) -> RadialField {
    let grid = field.grid();
    restrict(grid, gradient_ext(grid, &extended(field), Parity::Even))
}

/// `r·u′(r)`, the radial form of `x·∇u`.
pub fn radial_derivative_times_r(field: &RadialField) -> RadialField {
    let d = derivative(field);
    let grid = field.grid();
    let values = d.values().iter().enumerate().map(|(i, v)| grid.node(i) * v).collect();
    RadialField::from_parts(grid, values)
}

fn check_q(q: f64) -> Result<(), NormError> {
    if q >= 2.0 && q.is_finite() {
        Ok(())
    } else {
        Err(NormError::QMismatch(q))
    }
}

pub fn lq(field: &RadialField, q: f64) -> Result<f64, NormError> {
    check_q(q)?;
    Ok(integrate_power(field.grid(), &extended(field), q))
}

pub fn norms(field: &RadialField, q: f64) -> Result<Norms, NormError> {
    check_q(q)?;
    let grid = field.grid();
    let ext = extended(field);
    let grad = gradient_ext(grid, &ext, Parity::Even);
    let l2 = integrate_power(grid, &ext, 2.0);
    let lq = integrate_power(grid, &ext, q);
    let g2 = integrate_power(grid, &grad, 2.0);
    let gq = integrate_power(grid, &grad, q);
    let h1 = (l2 * l2 + g2 * g2).sqrt();
    let w1q = lq + gq;
    Ok(Norms { l2, lq, h1, w1q, intersection: h1.max(w1q) })
}

/// `‖u‖_q + ‖∇u‖_q + ‖D²u‖_q`, with the Hessian norm `√(u″² + (N−1)(u′/r)²)`.
pub fn w2q(field: &RadialField, q: f64) -> Result<f64, NormError> {
    check_q(q)?;
    let grid = field.grid();
    let ext = extended(field);
    let grad = gradient_ext(grid, &ext, Parity::Even);
    let hess = gradient_ext(grid, &grad, Parity::Odd);
    let n1 = grid.dim().as_f64() - 1.0;
    let h = grid.spacing();
    let hessian: Vec<f64> = hess
        .iter()
        .zip(&grad)
        .enumerate()
        .map(|(i, (d2, d1))| {
            // u′/r → u″(0) at the origin.
            let angular = if i == 0 { *d2 } else { d1 / (i as f64 * h) };
            (d2 * d2 + n1 * angular * angular).sqrt()
        })
        .collect();
    Ok(integrate_power(grid, &ext, q)
        + integrate_power(grid, &grad, q)
        + integrate_power(grid, &hessian, q))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn soliton(grid: &RadialGrid) -> RadialField {
        RadialField::from_fn(grid, |r| 2f64.sqrt() / r.cosh()).unwrap()
    }

    #[test]
    fn soliton_norms_match_closed_forms() {
        let g = RadialGrid::new(1, 4096, 40.0).unwrap();
        let n = norms(&soliton(&g), 4.0).unwrap();
        assert!((n.l2 - 2.0).abs() < 1e-10);
        assert!((n.h1 - (16.0f64 / 3.0).sqrt()).abs() < 1e-9);
        // ∫ 4 sech⁴ = 16/3.
        assert!((n.lq - (16.0f64 / 3.0).powf(0.25)).abs() < 1e-10);
        assert_eq!(n.intersection, n.h1.max(n.w1q));
    }

    #[test]
    fn gaussian_norms_in_three_dimensions() {
        // ∫_{ℝ³} e^{−r²} = π^{3/2}, ∫ r² e^{−r²} = (3/2) π^{3/2}.
        let g = RadialGrid::new(3, 2048, 20.0).unwrap();
        let u = RadialField::from_fn(&g, |r| (-r * r / 2.0).exp()).unwrap();
        let n = norms(&u, 2.0).unwrap();
        let l2 = PI.powf(0.75);
        assert!((n.l2 - l2).abs() < 1e-10);
        assert!((n.h1 - (2.5 * PI.powf(1.5)).sqrt()).abs() < 1e-9);
    }

    #[test]
    fn zero_field_has_zero_norms() {
        let g = RadialGrid::new(3, 256, 10.0).unwrap();
        let n = norms(&RadialField::zeros(&g), 4.0).unwrap();
        assert_eq!((n.l2, n.lq, n.h1, n.w1q), (0.0, 0.0, 0.0, 0.0));
        assert_eq!(w2q(&RadialField::zeros(&g), 4.0).unwrap(), 0.0);
    }

    #[test]
    fn q_below_two_is_rejected() {
        let g = RadialGrid::new(1, 256, 10.0).unwrap();
        assert_eq!(norms(&soliton(&g), 1.5).unwrap_err(), NormError::QMismatch(1.5));
    }

    #[test]
    fn second_order_norm_of_gaussian() {
        // N = 1: ‖u″‖₂² = ∫ (x² − 1)² e^{−x²} = (3/4)√π.
        let g = RadialGrid::new(1, 4096, 20.0).unwrap();
        let u = RadialField::from_fn(&g, |r| (-r * r / 2.0).exp()).unwrap();
        let n = norms(&u, 2.0).unwrap();
        let expected = n.l2 + (0.5 * PI.sqrt()).sqrt() + (0.75 * PI.sqrt()).sqrt();
        assert!((w2q(&u, 2.0).unwrap() - expected).abs() < 1e-8);
    }

    #[test]
    fn derivative_of_gaussian() {
        let g = RadialGrid::new(3, 1024, 20.0).unwrap();
        let u = RadialField::from_fn(&g, |r| (-r * r / 2.0).exp()).unwrap();
        let d = derivative(&u);
        let exact = RadialField::from_fn(&g, |r| -r * (-r * r / 2.0).exp()).unwrap();
        assert!(d.sub(&exact).unwrap().max_abs() < 1e-7);
    }
}
