//! The radial Fourier transform under the unitary convention `(2π)^{−N/2}∫e^{−iξ·x}`.
//!
//! For `N = 1` and even `u`, `û(ρ) = √(2/π)∫₀^∞ u(r) cos(ρr) dr`; for `N = 3`,
//! `û(ρ) = √(2/π) ρ⁻¹ ∫₀^∞ r u(r) sin(ρr) dr`. Both are discretized by the trapezoid
//! rule in `r` and the midpoint rule in `ρ`, which yields DCT-III/DCT-II and
//! DST-III/DST-II pairs.

use std::f64::consts::PI;

use crate::error::GridError;

use super::field::{RadialField, SpectralField};
use super::grid::{Dim, RadialGrid};

fn forward_scale(grid: &RadialGrid) -> f64 {
    (2.0 / PI).sqrt() * grid.spacing()
}

fn inverse_scale(grid: &RadialGrid) -> f64 {
    (2.0 / PI).sqrt() * grid.frequency_spacing()
}

pub fn forward(field: &RadialField) -> SpectralField {
    let grid = field.grid();
    let scale = forward_scale(grid);
    let mut buf = field.values().to_vec();
    match grid.dim() {
        Dim::One => {
            grid.plan().process_dct3(&mut buf);
            buf.iter_mut().for_each(|x| *x *= scale);
        }
        Dim::Three => {
            for (i, x) in buf.iter_mut().enumerate() {
                *x *= grid.node(i);
            }
            grid.plan().process_dst3(&mut buf);
            for (k, x) in buf.iter_mut().enumerate() {
                *x *= scale / grid.frequency(k);
            }
        }
    }
    SpectralField::from_parts(grid, buf)
}

pub fn inverse(spec: &SpectralField) -> RadialField {
    let grid = spec.grid();
    let scale = inverse_scale(grid);
    let mut buf = spec.coeffs().to_vec();
    match grid.dim() {
        Dim::One => {
            grid.plan().process_dct2(&mut buf);
            buf.iter_mut().for_each(|x| *x *= scale);
        }
        Dim::Three => {
            for (k, x) in buf.iter_mut().enumerate() {
                *x *= grid.frequency(k);
            }
            grid.plan().process_dst2(&mut buf);
            for (i, x) in buf.iter_mut().enumerate() {
                *x *= scale / grid.node(i);
            }
        }
    }
    RadialField::from_parts(grid, buf)
}

/// A Fourier multiplier sampled at the grid frequencies.
#[derive(Clone, Debug, PartialEq)]
pub struct Multiplier {
    grid: RadialGrid,
    symbol: Vec<f64>,
}

impl Multiplier {
    pub fn new(grid: &RadialGrid, symbol: impl Fn(f64) -> f64) -> Result<Self, GridError> {
        let symbol: Vec<f64> = grid.frequencies().into_iter().map(symbol).collect();
        if let Some(index) = symbol.iter().position(|x| !x.is_finite()) {
            return Err(GridError::NonFinite { index });
        }
        Ok(Self { grid: grid.clone(), symbol })
    }

    pub fn identity(grid: &RadialGrid) -> Self {
        Self { grid: grid.clone(), symbol: vec![1.0; grid.points()] }
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn symbol(&self) -> &[f64] {
        &self.symbol
    }

    /// Pointwise product of two multipliers.
    pub fn compose(&self, other: &Multiplier) -> Result<Self, GridError> {
        if self.grid != other.grid {
            return Err(GridError::Mismatch);
        }
        let symbol = self.symbol.iter().zip(&other.symbol).map(|(a, b)| a * b).collect();
        Ok(Self { grid: self.grid.clone(), symbol })
    }

    pub fn recip(&self) -> Result<Self, GridError> {
        let symbol: Vec<f64> = self.symbol.iter().map(|x| 1.0 / x).collect();
        if let Some(index) = symbol.iter().position(|x| !x.is_finite()) {
            return Err(GridError::NonFinite { index });
        }
        Ok(Self { grid: self.grid.clone(), symbol })
    }

    pub fn apply_spectral(&self, spec: &SpectralField) -> Result<SpectralField, GridError> {
        if self.grid != *spec.grid() {
            return Err(GridError::Mismatch);
        }
        let coeffs = spec.coeffs().iter().zip(&self.symbol).map(|(c, m)| c * m).collect();
        Ok(SpectralField::from_parts(&self.grid, coeffs))
    }

    /// `inverse(m(ρ)·forward(f))`.
    pub fn apply(&self, field: &RadialField) -> Result<RadialField, GridError> {
        if self.grid != *field.grid() {
            return Err(GridError::Mismatch);
        }
        Ok(inverse(&self.apply_spectral(&forward(field))?))
    }
}

/// One-shot multiplier application.
pub fn apply_multiplier(
    field: &RadialField,
    symbol: impl Fn(f64) -> f64,
) -> Result<RadialField, GridError> {
    Multiplier::new(field.grid(), symbol)?.apply(field)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian(grid: &RadialGrid) -> RadialField {
        RadialField::from_fn(grid, |r| (-r * r / 2.0).exp()).unwrap()
    }

    #[test]
    fn round_trip_is_exact() {
        for dim in [1, 3] {
            let g = RadialGrid::new(dim, 512, 20.0).unwrap();
            let u = RadialField::from_fn(&g, |r| (-r).exp() * (1.0 + r).cos()).unwrap();
            let back = inverse(&forward(&u));
            assert!(back.sub(&u).unwrap().max_abs() <= 1e-13 * u.max_abs(), "dim {dim}");
        }
    }

    #[test]
    fn gaussian_is_self_dual() {
        for dim in [1, 3] {
            let g = RadialGrid::new(dim, 1024, 30.0).unwrap();
            let spec = forward(&gaussian(&g));
            let err = spec
                .coeffs()
                .iter()
                .zip(g.frequencies())
                .fold(0.0f64, |m, (c, rho)| m.max((c - (-rho * rho / 2.0).exp()).abs()));
            assert!(err < 1e-12, "dim {dim}: {err}");
        }
    }

    #[test]
    fn plancherel_is_exact() {
        for dim in [1, 3] {
            let g = RadialGrid::new(dim, 256, 15.0).unwrap();
            let u = RadialField::from_fn(&g, |r| (1.0 - r / 15.0) * (3.0 * r).sin() / (1.0 + r)).unwrap();
            let spec = forward(&u);
            assert!((spec.l2() / u.l2() - 1.0).abs() < 1e-13, "dim {dim}");
        }
    }

    #[test]
    fn laplacian_of_gaussian() {
        for (dim, center) in [(1u32, 2.0), (3, 4.0)] {
            let g = RadialGrid::new(dim, 1024, 30.0).unwrap();
            let out = apply_multiplier(&gaussian(&g), |rho| rho * rho + 1.0).unwrap();
            let exact = RadialField::from_fn(&g, |r| (center - r * r) * (-r * r / 2.0).exp()).unwrap();
            let rel = out.sub(&exact).unwrap().l2() / exact.l2();
            assert!(rel < 1e-10, "dim {dim}: {rel}");
        }
    }

    #[test]
    fn multipliers_compose() {
        let g = RadialGrid::new(3, 256, 10.0).unwrap();
        let a = Multiplier::new(&g, |r| 1.0 / (1.0 + r * r)).unwrap();
        let b = Multiplier::new(&g, |r| (1.0 + r).sqrt()).unwrap();
        let u = gaussian(&g);
        let ab = a.compose(&b).unwrap().apply(&u).unwrap();
        let seq = a.apply(&b.apply(&u).unwrap()).unwrap();
        assert!(ab.sub(&seq).unwrap().l2() <= 1e-13 * ab.l2());
        let id = a.compose(&a.recip().unwrap()).unwrap().apply(&u).unwrap();
        assert!(id.sub(&u).unwrap().max_abs() < 1e-13);
    }

    #[test]
    fn zero_maps_to_zero() {
        let g = RadialGrid::new(1, 256, 10.0).unwrap();
        let z = RadialField::zeros(&g);
        assert_eq!(inverse(&forward(&z)).max_abs(), 0.0);
    }

    #[test]
    fn multiplier_rejects_foreign_field() {
        let g = RadialGrid::new(1, 256, 10.0).unwrap();
        let m = Multiplier::identity(&g);
        let other = RadialField::zeros(&RadialGrid::new(1, 256, 11.0).unwrap());
        assert_eq!(m.apply(&other).unwrap_err(), GridError::Mismatch);
    }
}
