//! Symbol multipliers, the dense operator `𝒜 = I − p u_∞^{p−1} P_∞(D)^{−1}`, and the
//! factorized inverse of the linearization `ℒ_{c,∞} = P_c(D) − p u_∞^{p−1}`:
//!
//! ```text
//! ℒ_{c,∞} = (I + B) 𝒜 P_c(D),   B = p u_∞^{p−1} (P_∞(D)^{−1} − P_c(D)^{−1}) 𝒜^{−1}
//! ```
//!
//! `𝒜` does not depend on `c`, so it is assembled and factored once per ground state
//! and shared by every light speed; `(I + B)^{−1}` is a Neumann series whose failure to
//! converge is the signal that `c` is below the contraction threshold.

use std::sync::Arc;

use faer::linalg::solvers::{PartialPivLu, Solve};
use faer::{ColMut, Mat};
use pseudorel_core::nonlinear::power_derivative;
use pseudorel_core::SymbolParams;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{GridError, OperatorError};
use crate::groundstate::GroundState;
use crate::radial::{band_limited, norms, Multiplier, RadialField, RadialGrid};

/// Relative size of the last Neumann term at which the series is truncated.
pub const NEUMANN_REL_TOL: f64 = 1e-14;
pub const NEUMANN_MAX_TERMS: usize = 50;
/// A Neumann term this much larger than the input means the series has diverged.
const NEUMANN_BLOWUP: f64 = 1e8;
/// Pivot ratio below which `𝒜` is declared singular.
const SINGULAR_PIVOT_RATIO: f64 = 1e-13;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OperatorKind {
    Multiplier,
    Composed,
    Dense,
}

pub trait LinearOperator {
    fn grid(&self) -> &RadialGrid;
    fn kind(&self) -> OperatorKind;
    fn apply(&self, f: &RadialField) -> Result<RadialField, OperatorError>;
}

impl LinearOperator for Multiplier {
    fn grid(&self) -> &RadialGrid {
        Multiplier::grid(self)
    }

    fn kind(&self) -> OperatorKind {
        OperatorKind::Multiplier
    }

    fn apply(&self, f: &RadialField) -> Result<RadialField, OperatorError> {
        Ok(Multiplier::apply(self, f)?)
    }
}

/// Every symbol multiplier needed at one light speed.
#[derive(Clone, Debug)]
pub struct SymbolOperators {
    pub params: SymbolParams,
    pub p_c: Multiplier,
    pub p_inf: Multiplier,
    pub inv_p_c: Multiplier,
    pub inv_p_inf: Multiplier,
    /// `P_∞ − P_c`, from the cancellation-free difference.
    pub diff: Multiplier,
    /// `1/P_∞ − 1/P_c`.
    pub gap: Multiplier,
}

impl SymbolOperators {
    pub fn new(grid: &RadialGrid, params: &SymbolParams) -> Result<Self, OperatorError> {
        let p_c = Multiplier::new(grid, |r| params.p_c(r))?;
        let p_inf = p_inf_multiplier(grid);
        Ok(Self {
            params: *params,
            inv_p_c: p_c.recip()?,
            inv_p_inf: p_inf.recip()?,
            diff: Multiplier::new(grid, |r| -params.diff(r))?,
            gap: Multiplier::new(grid, |r| params.multiplier_gap(r))?,
            p_c,
            p_inf,
        })
    }
}

pub fn p_inf_multiplier(grid: &RadialGrid) -> Multiplier {
    Multiplier::new(grid, |r| r * r + 1.0).expect("finite on the grid")
}

pub fn apply_p_inf(field: &RadialField) -> RadialField {
    p_inf_multiplier(field.grid()).apply(field).expect("same grid")
}

pub fn apply_p_c(field: &RadialField, params: &SymbolParams) -> Result<RadialField, OperatorError> {
    Ok(Multiplier::new(field.grid(), |r| params.p_c(r))?.apply(field)?)
}

/// `(P_∞(D) − P_c(D))f`.
pub fn apply_diff(field: &RadialField, params: &SymbolParams) -> Result<RadialField, OperatorError> {
    Ok(Multiplier::new(field.grid(), |r| -params.diff(r))?.apply(field)?)
}

/// `𝒜 = I − p u_∞^{p−1} P_∞(D)^{−1}` as a dense matrix with its LU factorization.
pub struct AOperator {
    grid: RadialGrid,
    potential: Vec<f64>,
    inv_p_inf: Multiplier,
    lu: PartialPivLu<f64>,
    pivot_ratio: f64,
}

impl std::fmt::Debug for AOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AOperator")
            .field("grid", &self.grid)
            .field("pivot_ratio", &self.pivot_ratio)
            .finish()
    }
}

impl AOperator {
    pub fn build(ground: &GroundState) -> Result<Self, OperatorError> {
        Self::from_profile(&ground.field, ground.p)
    }

    /// `𝒜` for an arbitrary profile; `u = 0` gives the identity.
    pub fn from_profile(u: &RadialField, p: f64) -> Result<Self, OperatorError> {
        let grid = u.grid().clone();
        let n = grid.points();
        let potential: Vec<f64> = u.values().iter().map(|v| power_derivative(*v, p)).collect();
        let inv_p_inf = p_inf_multiplier(&grid).recip()?;
        let mut a = Mat::<f64>::zeros(n, n);
        let mut basis = vec![0.0; n];
        for j in 0..n {
            basis[j] = 1.0;
            let e = RadialField::from_parts(&grid, basis.clone());
            basis[j] = 0.0;
            let smoothed = inv_p_inf.apply(&e)?;
            let col = a.col_as_slice_mut(j);
            for (i, (c, s)) in col.iter_mut().zip(smoothed.values()).enumerate() {
                *c = -potential[i] * s;
            }
            col[j] += 1.0;
        }
        let lu = a.partial_piv_lu();
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        let u_factor = lu.U();
        for i in 0..n {
            let d = u_factor[(i, i)].abs();
            lo = lo.min(d);
            hi = hi.max(d);
        }
        let pivot_ratio = lo / hi;
        if !(pivot_ratio > SINGULAR_PIVOT_RATIO) {
            return Err(OperatorError::SingularA { pivot_ratio });
        }
        Ok(Self { grid, potential, inv_p_inf, lu, pivot_ratio })
    }

    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    /// `min |U_ii| / max |U_ii|` of the LU factor.
    pub fn pivot_ratio(&self) -> f64 {
        self.pivot_ratio
    }

    fn check(&self, f: &RadialField) -> Result<(), OperatorError> {
        if f.grid() == &self.grid {
            Ok(())
        } else {
            Err(GridError::Mismatch.into())
        }
    }

    /// Multiplication by `p u_∞^{p−1}`.
    pub fn apply_potential(&self, f: &RadialField) -> RadialField {
        let v = f.values().iter().zip(&self.potential).map(|(a, d)| a * d).collect();
        RadialField::from_parts(&self.grid, v)
    }

    /// `𝒜⁻¹f` from the cached factorization.
    pub fn solve(&self, f: &RadialField) -> Result<RadialField, OperatorError> {
        self.check(f)?;
        let mut x = f.values().to_vec();
        self.lu.solve_in_place(ColMut::from_slice_mut(&mut x));
        Ok(RadialField::from_parts(&self.grid, x))
    }

    /// Adjoint of `𝒜⁻¹` for the weighted inner product: `W⁻¹ 𝒜^{−T} W f`.
    pub fn solve_adjoint(&self, f: &RadialField) -> Result<RadialField, OperatorError> {
        self.check(f)?;
        let w = self.grid.weights();
        let mut x: Vec<f64> = f.values().iter().zip(&w).map(|(a, w)| a * w).collect();
        self.lu.solve_transpose_in_place(ColMut::from_slice_mut(&mut x));
        x.iter_mut().zip(&w).for_each(|(a, w)| *a /= w);
        Ok(RadialField::from_parts(&self.grid, x))
    }

    /// Extreme singular values of `𝒜` in the weighted L² geometry, by power iteration on
    /// `𝒜*𝒜` and on its inverse.
    pub fn singular_value_bounds(&self, iterations: usize, seed: u64) -> Result<(f64, f64), OperatorError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let start = band_limited(&self.grid, &mut rng);
        let inv_sq = power_iteration(&start, iterations, |x| self.solve_adjoint(&self.solve(x)?))?;
        let adjoint = |x: &RadialField| -> Result<RadialField, OperatorError> {
            // 𝒜* = I − P_∞^{−1} D for the weighted inner product.
            let dx = self.apply_potential(x);
            Ok(x.sub(&self.inv_p_inf.apply(&dx)?)?)
        };
        let sq = power_iteration(&start, iterations, |x| adjoint(&self.apply(x)?))?;
        Ok((1.0 / inv_sq.sqrt(), sq.sqrt()))
    }
}

impl LinearOperator for AOperator {
    fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    fn kind(&self) -> OperatorKind {
        OperatorKind::Dense
    }

    fn apply(&self, f: &RadialField) -> Result<RadialField, OperatorError> {
        self.check(f)?;
        let smoothed = self.inv_p_inf.apply(f)?;
        Ok(f.sub(&self.apply_potential(&smoothed))?)
    }
}

/// Largest eigenvalue of a self-adjoint positive operator.
fn power_iteration(
    start: &RadialField,
    iterations: usize,
    op: impl Fn(&RadialField) -> Result<RadialField, OperatorError>,
) -> Result<f64, OperatorError> {
    let mut x = start.scaled(1.0 / start.l2());
    let mut lambda = 0.0;
    for _ in 0..iterations {
        let y = op(&x)?;
        let next = y.l2();
        if next == 0.0 {
            return Ok(0.0);
        }
        x = y.scaled(1.0 / next);
        let converged = (next - lambda).abs() <= 1e-10 * next;
        lambda = next;
        if converged {
            break;
        }
    }
    Ok(lambda)
}

/// Outcome of a Neumann expansion.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NeumannTrace {
    pub terms: usize,
    /// L² norm of the last term added.
    pub last_term: f64,
}

/// `ℒ_{c,∞} = P_c(D) − p u_∞^{p−1}`.
#[derive(Clone, Debug)]
pub struct LOperator {
    a: Arc<AOperator>,
    symbols: SymbolOperators,
}

impl LOperator {
    pub fn new(a: Arc<AOperator>, params: &SymbolParams) -> Result<Self, OperatorError> {
        let symbols = SymbolOperators::new(&a.grid, params)?;
        Ok(Self { a, symbols })
    }

    pub fn params(&self) -> &SymbolParams {
        &self.symbols.params
    }

    pub fn symbols(&self) -> &SymbolOperators {
        &self.symbols
    }

    pub fn a(&self) -> &Arc<AOperator> {
        &self.a
    }

    /// `B g = p u_∞^{p−1} 𝔞(D) 𝒜⁻¹ g`.
    pub fn apply_b(&self, g: &RadialField) -> Result<RadialField, OperatorError> {
        let x = self.a.solve(g)?;
        Ok(self.a.apply_potential(&self.symbols.gap.apply(&x)?))
    }

    /// `B*` for the weighted inner product.
    pub fn apply_b_adjoint(&self, g: &RadialField) -> Result<RadialField, OperatorError> {
        let x = self.symbols.gap.apply(&self.a.apply_potential(g))?;
        self.a.solve_adjoint(&x)
    }

    /// Power-iteration estimate of the weighted-L² norm of `B`.
    pub fn b_norm(&self, iterations: usize, seed: u64) -> Result<f64, OperatorError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let start = band_limited(&self.a.grid, &mut rng);
        let sq = power_iteration(&start, iterations, |x| self.apply_b_adjoint(&self.apply_b(x)?))?;
        Ok(sq.sqrt())
    }

    /// `(I + B)⁻¹f = Σ (−B)^k f`, truncated once a term drops below `rel_tol·‖f‖₂`.
    pub fn neumann(
        &self,
        f: &RadialField,
        rel_tol: f64,
        max_terms: usize,
    ) -> Result<(RadialField, NeumannTrace), OperatorError> {
        let scale = f.l2();
        if scale == 0.0 {
            return Ok((f.clone(), NeumannTrace { terms: 0, last_term: 0.0 }));
        }
        let mut sum = f.clone();
        let mut term = f.clone();
        let mut previous = scale;
        for k in 1..=max_terms {
            term = self.apply_b(&term)?.scaled(-1.0);
            sum.axpy(1.0, &term)?;
            let size = term.l2();
            if !size.is_finite() || size > NEUMANN_BLOWUP * scale {
                return Err(OperatorError::NeumannDivergence { terms: k, last_ratio: size / previous });
            }
            if size < rel_tol * scale {
                return Ok((sum, NeumannTrace { terms: k, last_term: size }));
            }
            if k == max_terms {
                return Err(OperatorError::NeumannDivergence { terms: k, last_ratio: size / previous });
            }
            previous = size;
        }
        unreachable!("loop returns on its last iteration")
    }

    /// `ℒ⁻¹f = P_c(D)⁻¹ 𝒜⁻¹ (I + B)⁻¹ f`.
    pub fn solve(&self, f: &RadialField) -> Result<RadialField, OperatorError> {
        self.solve_traced(f).map(|(x, _)| x)
    }

    pub fn solve_traced(&self, f: &RadialField) -> Result<(RadialField, NeumannTrace), OperatorError> {
        let (y, trace) = self.neumann(f, NEUMANN_REL_TOL, NEUMANN_MAX_TERMS)?;
        let x = self.a.solve(&y)?;
        Ok((self.symbols.inv_p_c.apply(&x)?, trace))
    }
}

impl LinearOperator for LOperator {
    fn grid(&self) -> &RadialGrid {
        &self.a.grid
    }

    fn kind(&self) -> OperatorKind {
        OperatorKind::Composed
    }

    /// `ℒ_{c,∞}u = P_c(D)u − p u_∞^{p−1}u`.
    fn apply(&self, u: &RadialField) -> Result<RadialField, OperatorError> {
        let pc = self.symbols.p_c.apply(u)?;
        Ok(pc.sub(&self.a.apply_potential(u))?)
    }
}

/// Observed ratios `‖P_c f‖_q / ‖f‖_{W^{1,q}}` and `‖P_c f‖_q / ‖f‖_{W^{2,q}}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormEquivalence {
    pub lower_min: f64,
    pub lower_max: f64,
    pub upper_min: f64,
    pub upper_max: f64,
}

pub fn norm_equivalence_ratios(
    field: &RadialField,
    params: &SymbolParams,
    q: f64,
) -> Result<(f64, f64), crate::Error> {
    let pcf = apply_p_c(field, params)?;
    let top = norms::lq(&pcf, q)?;
    Ok((top / norms(field, q)?.w1q, top / norms::w2q(field, q)?))
}

/// Ratios over `trials` random band-limited fields.
pub fn norm_equivalence_probe(
    grid: &RadialGrid,
    params: &SymbolParams,
    q: f64,
    trials: usize,
    seed: u64,
) -> Result<NormEquivalence, crate::Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = NormEquivalence {
        lower_min: f64::INFINITY,
        lower_max: 0.0,
        upper_min: f64::INFINITY,
        upper_max: 0.0,
    };
    for _ in 0..trials.max(1) {
        let f = band_limited(grid, &mut rng);
        let (lo, hi) = norm_equivalence_ratios(&f, params, q)?;
        out.lower_min = out.lower_min.min(lo);
        out.lower_max = out.lower_max.max(lo);
        out.upper_min = out.upper_min.min(hi);
        out.upper_max = out.upper_max.max(hi);
    }
    Ok(out)
}

/// Ratios of `‖(P_∞⁻¹ − P_c⁻¹)f‖_q` to `c^{−2s/(1−s)}‖f‖_q` and to
/// `c^{−2s²/(1−s)}‖P_∞^{−(1−s)}f‖_q`.
pub fn gap_contract_ratios(
    field: &RadialField,
    params: &SymbolParams,
    q: f64,
) -> Result<(f64, f64), crate::Error> {
    let (s, c) = (params.s(), params.c());
    let grid = field.grid();
    let gap = Multiplier::new(grid, |r| params.multiplier_gap(r))?.apply(field)?;
    let smooth = Multiplier::new(grid, |r| (r * r + 1.0).powf(-(1.0 - s)))?.apply(field)?;
    let g = norms::lq(&gap, q)?;
    let first = g / (c.powf(-2.0 * s / (1.0 - s)) * norms::lq(field, q)?);
    let second = g / (c.powf(-2.0 * s * s / (1.0 - s)) * norms::lq(&smooth, q)?);
    Ok((first, second))
}

/// Frozen constants for the two gap-operator contracts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapContractConstants {
    pub s: f64,
    pub q: f64,
    pub lebesgue: f64,
    pub smoothing: f64,
}

impl GapContractConstants {
    pub const SPEEDS: [f64; 3] = [4.0, 16.0, 64.0];
    pub const TRIALS: usize = 16;
    pub const MARGIN: f64 = 1.25;

    /// Largest ratio over [`Self::TRIALS`] random fields at each of [`Self::SPEEDS`],
    /// times [`Self::MARGIN`].
    pub fn calibrate(grid: &RadialGrid, s: f64, q: f64, seed: u64) -> Result<Self, crate::Error> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (mut lebesgue, mut smoothing) = (0.0f64, 0.0f64);
        for _ in 0..Self::TRIALS {
            let f = band_limited(grid, &mut rng);
            for &c in &Self::SPEEDS {
                let params = SymbolParams::normalized(s, c)?;
                let (a, b) = gap_contract_ratios(&f, &params, q)?;
                lebesgue = lebesgue.max(a);
                smoothing = smoothing.max(b);
            }
        }
        Ok(Self { s, q, lebesgue: Self::MARGIN * lebesgue, smoothing: Self::MARGIN * smoothing })
    }
}
