//! The remainder `Q`, the forcing `ℛ_c`, the fixed-point map
//! `Φ_c(w) = ℛ_c + ℒ_{c,∞}⁻¹Q(w)`, and the contraction-driven solve.
//!
//! A solution of `P_c(D)u = |u|^{p−1}u` is sought as `u_c = u_∞ + w` with `w` in the
//! ball `B_δ` of `H¹ ∩ W^{1,q}`. Failure to contract (Neumann divergence, leaving the
//! ball, steps that stop shrinking) is reported as [`SolveError::NoContraction`], which
//! always means "increase `c`".

use std::sync::Arc;

use pseudorel_core::nonlinear::{power, remainder};
use pseudorel_core::SymbolParams;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ContractionFailure, GridError, OperatorError, SolveError};
use crate::groundstate::{ground_state, GroundState, DEFAULT_TOL as GROUND_TOL};
use crate::operators::{apply_diff, AOperator, LOperator};
use crate::radial::{norms, smooth_random, Dim, Norms, RadialField, RadialGrid};

pub const DEFAULT_Q: f64 = 4.0;
pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 200;
/// Largest accepted relative equation residual.
pub const RESIDUAL_THRESHOLD: f64 = 1e-6;
pub const LIPSCHITZ_PAIRS: usize = 20;
pub const AUTO_C0_FACTOR: f64 = 1.5;
pub const AUTO_C0_ATTEMPTS: usize = 25;
/// Steps are expected to shrink from this iteration on.
const STEP_GROWTH_GRACE: usize = 3;

/// Everything a solve needs besides the ground state. Parameters are normalized.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    pub s: f64,
    pub c: f64,
    pub p: f64,
    pub q: f64,
    /// Ball radius in `H¹ ∩ W^{1,q}`; `None` selects `min(0.5, ‖u_∞‖_{H¹}/2)`.
    pub delta: Option<f64>,
    pub tol: f64,
    pub max_iter: usize,
    /// Random pairs for the Lipschitz probe; `0` skips it.
    pub lipschitz_pairs: usize,
    pub seed: u64,
}

impl SolveConfig {
    pub fn new(s: f64, c: f64, p: f64) -> Self {
        Self {
            s,
            c,
            p,
            q: DEFAULT_Q,
            delta: None,
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            lipschitz_pairs: LIPSCHITZ_PAIRS,
            seed: 0,
        }
    }

    pub fn with_speed(mut self, c: f64) -> Self {
        self.c = c;
        self
    }

    pub fn params(&self) -> Result<SymbolParams, SolveError> {
        Ok(SymbolParams::normalized(self.s, self.c)?)
    }

    pub fn resolved_delta(&self, u_inf: &RadialField) -> f64 {
        self.delta.unwrap_or_else(|| default_delta(u_inf, self.q))
    }

    fn validate(&self, problem: &LimitProblem) -> Result<f64, SolveError> {
        self.params()?;
        let dim = problem.grid().dim().as_f64();
        if !(self.q > dim) || !self.q.is_finite() {
            return Err(SolveError::Config(format!("q = {} must exceed N = {dim}", self.q)));
        }
        if (self.p - problem.ground.p).abs() > 0.0 {
            return Err(SolveError::Config(format!(
                "exponent p = {} differs from the ground state's p = {}",
                self.p, problem.ground.p
            )));
        }
        if !(self.tol > 0.0) || self.max_iter == 0 {
            return Err(SolveError::Config("tol must be positive and max_iter nonzero".into()));
        }
        let h1 = problem.limit_norms(self.q).h1;
        let delta = self.resolved_delta(&problem.ground.field);
        if !(delta > 0.0 && delta <= h1) {
            return Err(SolveError::Config(format!("delta = {delta} must lie in (0, {h1}]")));
        }
        Ok(delta)
    }
}

pub fn default_delta(u_inf: &RadialField, q: f64) -> f64 {
    let h1 = norms(u_inf, q.max(2.0)).map(|n| n.h1).unwrap_or(f64::INFINITY);
    (h1 / 2.0).min(0.5)
}

/// The ground state and the factored `𝒜`, shared by every light speed.
#[derive(Clone, Debug)]
pub struct LimitProblem {
    pub ground: Arc<GroundState>,
    pub a: Arc<AOperator>,
}

impl LimitProblem {
    pub fn new(ground: GroundState) -> Result<Self, OperatorError> {
        let a = AOperator::build(&ground)?;
        Ok(Self { ground: Arc::new(ground), a: Arc::new(a) })
    }

    /// Ground state by [`ground_state`] at the default tolerance, then `𝒜`.
    pub fn build(p: f64, grid: &RadialGrid) -> Result<Self, crate::Error> {
        Ok(Self::new(ground_state(p, grid, GROUND_TOL)?)?)
    }

    pub fn grid(&self) -> &RadialGrid {
        self.ground.grid()
    }

    pub fn u_inf(&self) -> &RadialField {
        &self.ground.field
    }

    pub fn limit_norms(&self, q: f64) -> Norms {
        norms(self.u_inf(), q).expect("q validated")
    }

    pub fn linearization(&self, params: &SymbolParams) -> Result<LOperator, OperatorError> {
        LOperator::new(Arc::clone(&self.a), params)
    }
}

/// `Q(w) = |w+u_∞|^{p−1}(w+u_∞) − u_∞^p − p u_∞^{p−1}w`, pointwise.
pub fn q_remainder(w: &RadialField, u_inf: &RadialField, p: f64) -> Result<RadialField, GridError> {
    u_inf.zip_map(w, |u, w| remainder(u, w, p))
}

fn x_norm(f: &RadialField, q: f64) -> f64 {
    norms(f, q).expect("q validated").intersection
}

fn no_contraction(c: f64) -> impl Fn(OperatorError) -> SolveError {
    move |e| match e {
        OperatorError::NeumannDivergence { .. } => {
            SolveError::NoContraction { c, cause: ContractionFailure::Neumann }
        }
        other => SolveError::Operator(other),
    }
}

/// `ℛ_c = ℒ_{c,∞}⁻¹(P_∞(D) − P_c(D))u_∞` and its `H¹ ∩ W^{1,q}` norm.
pub fn forcing_r_c(
    lop: &LOperator,
    u_inf: &RadialField,
    q: f64,
) -> Result<(RadialField, f64), SolveError> {
    let rhs = apply_diff(u_inf, lop.params())?;
    let r = lop.solve(&rhs)?;
    let norm = norms(&r, q).map_err(|e| SolveError::Config(e.to_string()))?.intersection;
    Ok((r, norm))
}

/// `‖P_c(D)u − |u|^{p−1}u‖₂ / ‖u‖₂`.
pub fn solution_residual(u: &RadialField, params: &SymbolParams, p: f64) -> Result<f64, SolveError> {
    let lhs = crate::operators::apply_p_c(u, params)?;
    let rhs = u.map(|v| power(v, p));
    Ok(lhs.sub(&rhs)?.l2() / u.l2())
}

/// The map `Φ_c` at one light speed.
pub struct FixedPointMap<'a> {
    problem: &'a LimitProblem,
    lop: LOperator,
    forcing: RadialField,
    forcing_norm: f64,
    p: f64,
    q: f64,
    delta: f64,
}

impl<'a> FixedPointMap<'a> {
    pub fn new(problem: &'a LimitProblem, config: &SolveConfig) -> Result<Self, SolveError> {
        let delta = config.validate(problem)?;
        let params = config.params()?;
        let c = config.c;
        let lop = problem.linearization(&params)?;
        let (forcing, forcing_norm) = match forcing_r_c(&lop, problem.u_inf(), config.q) {
            Err(SolveError::Operator(e)) => return Err(no_contraction(c)(e)),
            other => other?,
        };
        Ok(Self { problem, lop, forcing, forcing_norm, p: config.p, q: config.q, delta })
    }

    pub fn forcing(&self) -> &RadialField {
        &self.forcing
    }

    pub fn forcing_norm(&self) -> f64 {
        self.forcing_norm
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn linearization(&self) -> &LOperator {
        &self.lop
    }

    /// `ℒ⁻¹Q(w)`.
    pub fn correction(&self, w: &RadialField) -> Result<RadialField, SolveError> {
        let qw = q_remainder(w, self.problem.u_inf(), self.p)?;
        self.lop.solve(&qw).map_err(no_contraction(self.lop.params().c()))
    }

    /// `Φ_c(w)`, without the ball check.
    pub fn apply(&self, w: &RadialField) -> Result<RadialField, SolveError> {
        Ok(self.forcing.add(&self.correction(w)?)?)
    }

    /// `Φ_c(w)`, failing with `BallExit` when the image leaves `B_δ`.
    pub fn apply_in_ball(&self, w: &RadialField) -> Result<(RadialField, f64), SolveError> {
        let next = self.apply(w)?;
        let norm = x_norm(&next, self.q);
        if !(norm <= self.delta) {
            return Err(SolveError::NoContraction {
                c: self.lop.params().c(),
                cause: ContractionFailure::BallExit,
            });
        }
        Ok((next, norm))
    }

    /// A random field of `H¹ ∩ W^{1,q}` norm `radius`.
    pub fn random_in_ball(&self, rng: &mut impl Rng, radius: f64) -> RadialField {
        let f = smooth_random(self.problem.grid(), rng);
        f.scaled(radius / x_norm(&f, self.q))
    }

    /// Largest `‖Φ(w₁) − Φ(w₂)‖ / ‖w₁ − w₂‖` over random pairs in `B_δ`, norms in
    /// `H¹ ∩ W^{1,q}`.
    pub fn lipschitz_probe(&self, pairs: usize, seed: u64) -> Result<f64, SolveError> {
        self.difference_probe(self.delta, pairs, seed)
    }

    /// As [`Self::lipschitz_probe`] with pairs drawn from the ball of radius `delta`.
    pub fn difference_probe(&self, delta: f64, pairs: usize, seed: u64) -> Result<f64, SolveError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst = 0.0f64;
        for _ in 0..pairs {
            let r1 = delta * rng.gen_range(0.1..=1.0);
            let r2 = delta * rng.gen_range(0.1..=1.0);
            let w1 = self.random_in_ball(&mut rng, r1);
            let w2 = self.random_in_ball(&mut rng, r2);
            // ℒ⁻¹ is linear, so one solve serves both members of the pair.
            let u = self.problem.u_inf();
            let dq = q_remainder(&w1, u, self.p)?.sub(&q_remainder(&w2, u, self.p)?)?;
            let num = self.lop.solve(&dq).map_err(no_contraction(self.lop.params().c()))?;
            let den = x_norm(&w1.sub(&w2)?, self.q);
            worst = worst.max(x_norm(&num, self.q) / den);
        }
        Ok(worst)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    /// L² norm of `w_{k} − w_{k−1}`.
    pub step: f64,
    /// `H¹ ∩ W^{1,q}` norm of `w_k`.
    pub norm: f64,
}

/// A light speed tried by the upward walk and why it failed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Attempt {
    pub c: f64,
    pub cause: ContractionFailure,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    /// The configuration actually solved, with `c` and `delta` resolved.
    pub config: SolveConfig,
    pub dim: Dim,
    #[serde(rename = "K")]
    pub points: usize,
    #[serde(rename = "R")]
    pub radius: f64,
    pub iterations: usize,
    pub final_step: f64,
    pub residual: f64,
    pub lipschitz_probe: Option<f64>,
    /// Norms of `w = u_c − u_∞`.
    pub norms: Norms,
    pub forcing_norm: f64,
    pub trace: Vec<IterationRecord>,
    /// Lower light speeds that failed before this one, when walking upward.
    pub attempts: Vec<Attempt>,
    pub w: RadialField,
    pub u_c: RadialField,
}

impl SolveReport {
    pub fn params(&self) -> Result<SymbolParams, SolveError> {
        self.config.params()
    }
}

/// Iterates `w ← Φ_c(w)` from `w₀ = 0`.
pub fn solve(problem: &LimitProblem, config: &SolveConfig) -> Result<SolveReport, SolveError> {
    let map = FixedPointMap::new(problem, config)?;
    run(&map, problem, config, RadialField::zeros(problem.grid()))
}

/// Iterates from a given start, e.g. `w₀ = ℛ_c` for the uniqueness witness.
pub fn solve_from(
    problem: &LimitProblem,
    config: &SolveConfig,
    w0: RadialField,
) -> Result<SolveReport, SolveError> {
    let map = FixedPointMap::new(problem, config)?;
    w0.check_same_grid(problem.u_inf())?;
    run(&map, problem, config, w0)
}

/// Walks `c` upward by [`AUTO_C0_FACTOR`] until a solve succeeds.
pub fn solve_auto(problem: &LimitProblem, config: &SolveConfig) -> Result<SolveReport, SolveError> {
    let mut attempts = Vec::new();
    let mut c = config.c;
    for _ in 0..AUTO_C0_ATTEMPTS {
        match solve(problem, &config.with_speed(c)) {
            Ok(mut report) => {
                report.attempts = attempts;
                return Ok(report);
            }
            Err(SolveError::NoContraction { cause, .. }) => {
                attempts.push(Attempt { c, cause });
                c *= AUTO_C0_FACTOR;
            }
            Err(e) => return Err(e),
        }
    }
    let cause = attempts.last().map(|a| a.cause).unwrap_or(ContractionFailure::IterationLimit);
    Err(SolveError::NoContraction { c, cause })
}

fn run(
    map: &FixedPointMap<'_>,
    problem: &LimitProblem,
    config: &SolveConfig,
    w0: RadialField,
) -> Result<SolveReport, SolveError> {
    let c = config.c;
    let mut w = w0;
    let mut trace: Vec<IterationRecord> = Vec::new();
    let mut converged = false;
    for iteration in 1..=config.max_iter {
        let (next, norm) = map.apply_in_ball(&w)?;
        let step = next.sub(&w)?.l2();
        w = next;
        let previous = trace.last().map(|r| r.step);
        trace.push(IterationRecord { iteration, step, norm });
        if step < config.tol {
            converged = true;
            break;
        }
        if let Some(prev) = previous {
            if iteration > STEP_GROWTH_GRACE && step >= prev && step > 10.0 * config.tol {
                return Err(SolveError::NoContraction { c, cause: ContractionFailure::StepGrowth });
            }
        }
    }
    if !converged {
        return Err(SolveError::NoContraction { c, cause: ContractionFailure::IterationLimit });
    }
    let params = config.params()?;
    let u_c = problem.u_inf().add(&w)?;
    let residual = solution_residual(&u_c, &params, config.p)?;
    if !(residual <= RESIDUAL_THRESHOLD) {
        return Err(SolveError::ResidualTooLarge { residual, threshold: RESIDUAL_THRESHOLD });
    }
    let lipschitz_probe = match config.lipschitz_pairs {
        0 => None,
        n => Some(map.lipschitz_probe(n, config.seed)?),
    };
    let grid = problem.grid();
    let last = *trace.last().expect("at least one iteration");
    Ok(SolveReport {
        config: SolveConfig { delta: Some(map.delta()), ..*config },
        dim: grid.dim(),
        points: grid.points(),
        radius: grid.radius(),
        iterations: last.iteration,
        final_step: last.step,
        residual,
        lipschitz_probe,
        norms: norms(&w, config.q).expect("q validated"),
        forcing_norm: map.forcing_norm(),
        trace,
        attempts: Vec::new(),
        w,
        u_c,
    })
}
