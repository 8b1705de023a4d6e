//! Uniform radial grids in `N ∈ {1, 3}`, the radial Fourier transform pair, Fourier
//! multipliers, and norms.

mod field;
mod grid;
pub mod norms;
mod transform;

pub use field::{RadialField, SpectralField};
pub use grid::{Dim, RadialGrid};
pub use norms::{norms, Norms};
pub use transform::{apply_multiplier, forward, inverse, Multiplier};

use rand::Rng;

/// Share of the spectrum populated by [`band_limited`].
pub const PROBE_BAND_DIVISOR: usize = 8;

/// Random field whose coefficients are uniform in `[−1, 1]` on the lowest `K/8`
/// frequencies and zero above.
pub fn band_limited(grid: &RadialGrid, rng: &mut impl Rng) -> RadialField {
    let band = grid.points() / PROBE_BAND_DIVISOR;
    let coeffs = (0..grid.points())
        .map(|k| if k < band { rng.gen_range(-1.0..=1.0) } else { 0.0 })
        .collect();
    inverse(&SpectralField::from_parts(grid, coeffs))
}

/// Gaussians per [`smooth_random`] field.
pub const SMOOTH_TERMS: usize = 4;

/// `Σ a_j e^{−r²/(2ℓ_j²)}` with `a_j` uniform in `[−1, 1]` and `ℓ_j` uniform in
/// `[1/2, 3]`: smooth, decaying, and cheap to sample.
pub fn smooth_random(grid: &RadialGrid, rng: &mut impl Rng) -> RadialField {
    let terms: Vec<(f64, f64)> = (0..SMOOTH_TERMS)
        .map(|_| (rng.gen_range(-1.0..=1.0), rng.gen_range(0.5..=3.0)))
        .collect();
    RadialField::from_fn(grid, |r| {
        terms.iter().map(|(a, l)| a * (-r * r / (2.0 * l * l)).exp()).sum()
    })
    .expect("finite on the grid")
}
