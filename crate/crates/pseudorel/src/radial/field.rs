use crate::error::GridError;

use super::grid::RadialGrid;

/// Physical samples `u(r_i)` of a radial function.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialField {
    grid: RadialGrid,
    values: Vec<f64>,
}

/// Transform coefficients `û(ρ_k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    grid: RadialGrid,
    coeffs: Vec<f64>,
}

fn check_samples(grid: &RadialGrid, v: &[f64]) -> Result<(), GridError> {
    grid.check_len(v.len())?;
    match v.iter().position(|x| !x.is_finite()) {
        Some(index) => Err(GridError::NonFinite { index }),
        None => Ok(()),
    }
}

impl RadialField {
    pub fn new(grid: &RadialGrid, values: Vec<f64>) -> Result<Self, GridError> {
        check_samples(grid, &values)?;
        Ok(Self { grid: grid.clone(), values })
    }

    /// Internal constructor for values produced by grid operations.
    pub(crate) fn from_parts(grid: &RadialGrid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.points());
        Self { grid: grid.clone(), values }
    }

    pub fn zeros(grid: &RadialGrid) -> Self {
        Self::from_parts(grid, vec![0.0; grid.points()])
    }

    pub fn from_fn(grid: &RadialGrid, f: impl Fn(f64) -> f64) -> Result<Self, GridError> {
        Self::new(grid, grid.nodes().into_iter().map(f).collect())
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn check_same_grid(&self, other: &RadialField) -> Result<(), GridError> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(GridError::Mismatch)
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::from_parts(&self.grid, self.values.iter().map(|v| f(*v)).collect())
    }

    pub fn zip_map(
        &self,
        other: &RadialField,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<Self, GridError> {
        self.check_same_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| f(*a, *b)).collect();
        Ok(Self::from_parts(&self.grid, values))
    }

    pub fn add(&self, other: &RadialField) -> Result<Self, GridError> {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &RadialField) -> Result<Self, GridError> {
        self.zip_map(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &RadialField) -> Result<Self, GridError> {
        self.zip_map(other, |a, b| a * b)
    }

    pub fn scaled(&self, a: f64) -> Self {
        self.map(|v| a * v)
    }

    /// `self ← self + a·x`.
    pub fn axpy(&mut self, a: f64, x: &RadialField) -> Result<(), GridError> {
        self.check_same_grid(x)?;
        for (s, v) in self.values.iter_mut().zip(&x.values) {
            *s += a * v;
        }
        Ok(())
    }

    /// Inner product under the trapezoid weights of the radial measure.
    pub fn dot(&self, other: &RadialField) -> Result<f64, GridError> {
        self.check_same_grid(other)?;
        let w = self.grid.weights();
        Ok(self.values.iter().zip(&other.values).zip(&w).map(|((a, b), w)| a * b * w).sum())
    }

    /// L² norm under the trapezoid weights; the transform is an isometry for it.
    pub fn l2(&self) -> f64 {
        let w = self.grid.weights();
        self.values.iter().zip(&w).map(|(a, w)| a * a * w).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl SpectralField {
    pub fn new(grid: &RadialGrid, coeffs: Vec<f64>) -> Result<Self, GridError> {
        check_samples(grid, &coeffs)?;
        Ok(Self { grid: grid.clone(), coeffs })
    }

    pub(crate) fn from_parts(grid: &RadialGrid, coeffs: Vec<f64>) -> Self {
        debug_assert_eq!(coeffs.len(), grid.points());
        Self { grid: grid.clone(), coeffs }
    }

    pub fn from_fn(grid: &RadialGrid, f: impl Fn(f64) -> f64) -> Result<Self, GridError> {
        Self::new(grid, grid.frequencies().into_iter().map(f).collect())
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn l2(&self) -> f64 {
        let w = self.grid.spectral_weights();
        self.coeffs.iter().zip(&w).map(|(a, w)| a * a * w).sum::<f64>().sqrt()
    }

    /// Weighted `Σ w_k m(ρ_k) |û_k|²`.
    pub fn quadratic_form(&self, symbol: impl Fn(f64) -> f64) -> f64 {
        let w = self.grid.spectral_weights();
        self.grid
            .frequencies()
            .iter()
            .zip(&self.coeffs)
            .zip(&w)
            .map(|((rho, c), w)| symbol(*rho) * c * c * w)
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> RadialGrid {
        RadialGrid::new(3, 256, 10.0).unwrap()
    }

    #[test]
    fn rejects_non_finite_and_wrong_length() {
        let g = grid();
        let mut v = vec![0.0; 256];
        v[7] = f64::NAN;
        assert_eq!(RadialField::new(&g, v).unwrap_err(), GridError::NonFinite { index: 7 });
        assert!(matches!(RadialField::new(&g, vec![0.0; 10]), Err(GridError::Length { .. })));
    }

    #[test]
    fn mixing_grids_is_an_error() {
        let a = RadialField::zeros(&grid());
        let b = RadialField::zeros(&RadialGrid::new(3, 512, 10.0).unwrap());
        assert_eq!(a.add(&b).unwrap_err(), GridError::Mismatch);
        assert!(a.dot(&b).is_err());
    }

    #[test]
    fn arithmetic() {
        let g = grid();
        let a = RadialField::from_fn(&g, |r| r).unwrap();
        let mut b = a.scaled(2.0);
        b.axpy(-1.0, &a).unwrap();
        assert_eq!(b, a);
        assert_eq!(a.sub(&a).unwrap().max_abs(), 0.0);
        assert!((a.dot(&a).unwrap().sqrt() - a.l2()).abs() < 1e-12 * a.l2());
    }
}
