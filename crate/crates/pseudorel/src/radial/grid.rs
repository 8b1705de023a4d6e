use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rustdct::{DctPlanner, TransformType2And3};

use crate::error::GridError;

/// Spatial dimension of the radial problem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub enum Dim {
    One,
    Three,
}

impl Dim {
    pub fn as_u32(self) -> u32 {
        match self {
            Self::One => 1,
            Self::Three => 3,
        }
    }

    pub fn as_f64(self) -> f64 {
        self.as_u32() as f64
    }
}

impl TryFrom<u32> for Dim {
    type Error = GridError;

    fn try_from(n: u32) -> Result<Self, GridError> {
        match n {
            1 => Ok(Self::One),
            3 => Ok(Self::Three),
            other => Err(GridError::UnsupportedDim(other)),
        }
    }
}

impl From<Dim> for u32 {
    fn from(d: Dim) -> u32 {
        d.as_u32()
    }
}

impl fmt::Display for Dim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_u32())
    }
}

/// Uniform radial discretization of `[0, R]` with `K` degrees of freedom and spacing
/// `h = R/K`.
///
/// Nodes:
/// - `N = 1`: `r_i = i·h`, `i = 0..K`; the sample at `r = R` is the implied zero.
/// - `N = 3`: `r_i = (i + 1)·h`, `i = 0..K`; the last node is `r = R`.
///
/// Frequencies are `ρ_k = (k + ½)π/R`, `k = 0..K`, for both dimensions. With this
/// choice the discrete cosine (`N = 1`) and sine (`N = 3`) transforms below are exact
/// inverses and exactly unitary for the trapezoid weights of the radial measure.
#[derive(Clone)]
pub struct RadialGrid {
    dim: Dim,
    points: usize,
    radius: f64,
    plan: Arc<dyn TransformType2And3<f64>>,
}

impl PartialEq for RadialGrid {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.points == other.points
            && self.radius.to_bits() == other.radius.to_bits()
    }
}

impl fmt::Debug for RadialGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialGrid")
            .field("dim", &self.dim)
            .field("points", &self.points)
            .field("radius", &self.radius)
            .finish()
    }
}

impl RadialGrid {
    pub const MIN_POINTS: usize = 256;

    pub fn new(dim: u32, points: usize, radius: f64) -> Result<Self, GridError> {
        let dim = Dim::try_from(dim)?;
        if points < Self::MIN_POINTS || !points.is_power_of_two() {
            return Err(GridError::BadPointCount(points));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(GridError::BadRadius(radius));
        }
        let plan = DctPlanner::new().plan_dct2(points);
        Ok(Self { dim, points, radius, plan })
    }

    /// Same dimension with different resolution or truncation.
    pub fn resized(&self, points: usize, radius: f64) -> Result<Self, GridError> {
        Self::new(self.dim.as_u32(), points, radius)
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn spacing(&self) -> f64 {
        self.radius / self.points as f64
    }

    /// Frequency spacing `π/R`.
    pub fn frequency_spacing(&self) -> f64 {
        PI / self.radius
    }

    pub fn node(&self, i: usize) -> f64 {
        match self.dim {
            Dim::One => i as f64 * self.spacing(),
            Dim::Three => (i + 1) as f64 * self.spacing(),
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.node(i)).collect()
    }

    pub fn frequency(&self, k: usize) -> f64 {
        (k as f64 + 0.5) * self.frequency_spacing()
    }

    pub fn frequencies(&self) -> Vec<f64> {
        (0..self.points).map(|k| self.frequency(k)).collect()
    }

    /// Trapezoid weights of the radial measure (`2 dr` or `4πr² dr`) at the nodes.
    pub fn weights(&self) -> Vec<f64> {
        let h = self.spacing();
        match self.dim {
            Dim::One => {
                let mut w = vec![2.0 * h; self.points];
                w[0] = h;
                w
            }
            Dim::Three => {
                let mut w: Vec<f64> = self
                    .nodes()
                    .iter()
                    .map(|r| 4.0 * PI * r * r * h)
                    .collect();
                w[self.points - 1] *= 0.5;
                w
            }
        }
    }

    /// Spectral weights under which the forward transform is an isometry.
    pub fn spectral_weights(&self) -> Vec<f64> {
        let dr = self.frequency_spacing();
        match self.dim {
            Dim::One => vec![2.0 * dr; self.points],
            Dim::Three => self.frequencies().iter().map(|r| 4.0 * PI * r * r * dr).collect(),
        }
    }

    pub(crate) fn plan(&self) -> &dyn TransformType2And3<f64> {
        self.plan.as_ref()
    }

    pub fn check_len(&self, len: usize) -> Result<(), GridError> {
        if len == self.points {
            Ok(())
        } else {
            Err(GridError::Length { expected: self.points, got: len })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometry_is_consistent() {
        for dim in [1, 3] {
            let g = RadialGrid::new(dim, 256, 20.0).unwrap();
            assert!((g.spacing() * 256.0 - 20.0).abs() < 1e-14);
            assert_eq!(g.nodes().len(), 256);
            assert!((g.frequency(0) - 0.5 * PI / 20.0).abs() < 1e-15);
        }
        let g3 = RadialGrid::new(3, 256, 20.0).unwrap();
        assert!((g3.node(255) - 20.0).abs() < 1e-13);
        let g1 = RadialGrid::new(1, 256, 20.0).unwrap();
        assert_eq!(g1.node(0), 0.0);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(RadialGrid::new(2, 256, 1.0).unwrap_err(), GridError::UnsupportedDim(2));
        assert_eq!(RadialGrid::new(1, 300, 1.0).unwrap_err(), GridError::BadPointCount(300));
        assert_eq!(RadialGrid::new(1, 128, 1.0).unwrap_err(), GridError::BadPointCount(128));
        assert!(matches!(RadialGrid::new(3, 256, -1.0), Err(GridError::BadRadius(_))));
    }

    #[test]
    fn weights_integrate_measure() {
        // ∫_ℝ e^{−x²} = √π, ∫_{ℝ³} e^{−r²} = π^{3/2}.
        let g1 = RadialGrid::new(1, 1024, 20.0).unwrap();
        let i1: f64 = g1.nodes().iter().zip(g1.weights()).map(|(r, w)| w * (-r * r).exp()).sum();
        assert!((i1 - PI.sqrt()).abs() < 1e-13);
        let g3 = RadialGrid::new(3, 1024, 20.0).unwrap();
        let i3: f64 = g3.nodes().iter().zip(g3.weights()).map(|(r, w)| w * (-r * r).exp()).sum();
        assert!((i3 - PI.powf(1.5)).abs() < 1e-12);
    }

    #[test]
    fn equality_ignores_plan_identity() {
        let a = RadialGrid::new(3, 512, 10.0).unwrap();
        let b = RadialGrid::new(3, 512, 10.0).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, a.resized(1024, 10.0).unwrap());
    }

    #[test]
    fn dim_serializes_as_integer() {
        assert_eq!(serde_json::to_string(&Dim::Three).unwrap(), "3");
        assert_eq!(serde_json::from_str::<Dim>("1").unwrap(), Dim::One);
        assert!(serde_json::from_str::<Dim>("2").is_err());
    }
}
