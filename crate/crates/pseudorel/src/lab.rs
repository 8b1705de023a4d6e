//! Rate studies over light-speed ladders, run manifests, emission, and replay.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use pseudorel_core::fit::loglog_fit;
use pseudorel_core::symbols::DecayConstants;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ContractionFailure, LabError, SolveError};
use crate::groundstate::Method;
use crate::io::{self, Cell};
use crate::operators::GapContractConstants;
use crate::radial::RadialGrid;
use crate::solver::{self, LimitProblem, SolveConfig, DEFAULT_MAX_ITER, DEFAULT_Q, DEFAULT_TOL};

pub const MIN_LADDER: usize = 4;
pub const CSV_HEADER: [&str; 11] =
    ["c", "s", "p", "N", "q", "norm_h1", "norm_w1q", "norm_max", "iters", "residual", "converged"];
/// Relative agreement demanded of a replay.
pub const REPLAY_REL_TOL: f64 = 1e-12;
/// Relative slack on the fitted exponent when `p > 2`.
pub const RATE_REL_TOL: f64 = 0.15;
/// Absolute slack on the bound when `p ≤ 2`.
pub const RATE_BOUND_SLACK: f64 = 0.5;
pub const DEFAULT_POINTS: usize = 4096;
pub const DEFAULT_RADIUS: f64 = 40.0;

/// A rate study: everything in a [`SolveConfig`] except `c`, plus the grid and ladder.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateConfig {
    pub dim: u32,
    pub p: f64,
    pub s: f64,
    pub q: f64,
    pub c_values: Vec<f64>,
    pub auto_c0: bool,
    #[serde(rename = "K")]
    pub points: usize,
    #[serde(rename = "R")]
    pub radius: f64,
    pub delta: Option<f64>,
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl RateConfig {
    pub fn new(dim: u32, p: f64, s: f64, c_values: Vec<f64>) -> Self {
        Self {
            dim,
            p,
            s,
            q: DEFAULT_Q,
            c_values,
            auto_c0: false,
            points: DEFAULT_POINTS,
            radius: DEFAULT_RADIUS,
            delta: None,
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            seed: 0,
        }
    }

    pub fn grid(&self) -> Result<RadialGrid, crate::Error> {
        Ok(RadialGrid::new(self.dim, self.points, self.radius)?)
    }

    /// The per-speed solve. Rate studies skip the Lipschitz probe.
    pub fn solve_config(&self, c: f64) -> SolveConfig {
        SolveConfig {
            q: self.q,
            delta: self.delta,
            tol: self.tol,
            max_iter: self.max_iter,
            lipschitz_pairs: 0,
            seed: self.seed,
            ..SolveConfig::new(self.s, c, self.p)
        }
    }

    /// `−2s²/(1−s)` for `p ≤ 2`, else `−2s/(1−s)`.
    pub fn expected_exponent(&self) -> f64 {
        expected_exponent(self.s, self.p)
    }

    fn check_ladder(&self) -> Result<(), LabError> {
        let increasing = self.c_values.windows(2).all(|w| w[0] < w[1]);
        let positive = self.c_values.iter().all(|c| c.is_finite() && *c > 0.0);
        if self.c_values.len() < MIN_LADDER || !increasing || !positive {
            return Err(LabError::BadLadder);
        }
        Ok(())
    }
}

pub fn expected_exponent(s: f64, p: f64) -> f64 {
    if p <= 2.0 {
        -2.0 * s * s / (1.0 - s)
    } else {
        -2.0 * s / (1.0 - s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateEntry {
    pub c: f64,
    pub s: f64,
    pub p: f64,
    #[serde(rename = "N")]
    pub dim: u32,
    pub q: f64,
    pub converged: bool,
    /// Norms of `u_c − u_∞`; zero when not converged.
    pub norm_h1: f64,
    pub norm_w1q: f64,
    /// `H¹ ∩ W^{1,q}` norm, the fitted quantity.
    pub norm_max: f64,
    /// `H¹ ∩ W^{1,q}` norm of the forcing `ℛ_c`.
    pub forcing_norm: f64,
    pub iters: usize,
    pub residual: f64,
    /// Why the solve failed, or `trimmed` when below the discovered threshold.
    pub failure: Option<String>,
}

impl RateEntry {
    fn failed(config: &RateConfig, c: f64, failure: String) -> Self {
        Self {
            c,
            s: config.s,
            p: config.p,
            dim: config.dim,
            q: config.q,
            converged: false,
            norm_h1: 0.0,
            norm_w1q: 0.0,
            norm_max: 0.0,
            forcing_norm: 0.0,
            iters: 0,
            residual: 0.0,
            failure: Some(failure),
        }
    }

    fn csv_row(&self) -> Vec<Cell> {
        let num = |x: f64| if self.converged { Cell::Num(x) } else { Cell::Empty };
        vec![
            Cell::Num(self.c),
            Cell::Num(self.s),
            Cell::Num(self.p),
            Cell::Int(self.dim as u64),
            Cell::Num(self.q),
            num(self.norm_h1),
            num(self.norm_w1q),
            num(self.norm_max),
            if self.converged { Cell::Int(self.iters as u64) } else { Cell::Empty },
            num(self.residual),
            Cell::Bool(self.converged),
        ]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

pub fn fit_slope(c: &[f64], norms: &[f64]) -> Option<SlopeFit> {
    loglog_fit(c, norms).map(|f| SlopeFit {
        slope: f.slope,
        intercept: f.intercept,
        r_squared: f.r_squared,
        points: f.points,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub passed: bool,
    pub slope: f64,
    pub expected: f64,
    /// `two_sided` for `p > 2`, `upper_bound` for `p ≤ 2`.
    pub rule: VerdictRule,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictRule {
    TwoSided,
    UpperBound,
}

/// `p > 2`: `|slope − e| ≤ 0.15|e|`; `p ≤ 2`: `slope ≤ e + 0.5`, with `e` the expected
/// exponent.
pub fn verdict(s: f64, p: f64, slope: f64) -> Verdict {
    let expected = expected_exponent(s, p);
    let (passed, rule) = if p > 2.0 {
        ((slope - expected).abs() <= RATE_REL_TOL * expected.abs(), VerdictRule::TwoSided)
    } else {
        (slope <= expected + RATE_BOUND_SLACK, VerdictRule::UpperBound)
    };
    Verdict { passed, slope, expected, rule }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateStudy {
    pub config: RateConfig,
    pub entries: Vec<RateEntry>,
    /// First converged speed of the upward walk, with `auto_c0`.
    pub c0: Option<f64>,
    /// Speeds left out of the fit.
    pub excluded: Vec<f64>,
    pub fit: SlopeFit,
    pub expected_exponent: f64,
    pub verdict: Verdict,
}

impl RateStudy {
    pub fn converged(&self) -> impl Iterator<Item = &RateEntry> {
        self.entries.iter().filter(|e| e.converged)
    }

    fn series(&self, skip: usize) -> (Vec<f64>, Vec<f64>) {
        self.converged().skip(skip).map(|e| (e.c, e.norm_max)).unzip()
    }

    /// Refit without the smallest converged speed.
    pub fn slope_without_smallest(&self) -> Option<f64> {
        let (c, n) = self.series(1);
        fit_slope(&c, &n).map(|f| f.slope)
    }

    /// Fit of the forcing norms over the converged speeds.
    pub fn forcing_fit(&self) -> Option<SlopeFit> {
        let (c, n): (Vec<f64>, Vec<f64>) = self.converged().map(|e| (e.c, e.forcing_norm)).unzip();
        fit_slope(&c, &n)
    }

    pub fn norms_strictly_decreasing(&self) -> bool {
        let (_, n) = self.series(0);
        n.windows(2).all(|w| w[1] < w[0])
    }
}

fn failure_label(e: &SolveError) -> String {
    match e {
        SolveError::NoContraction { cause, .. } => match cause {
            ContractionFailure::Neumann => "no_contraction:neumann",
            ContractionFailure::BallExit => "no_contraction:ball_exit",
            ContractionFailure::StepGrowth => "no_contraction:step_growth",
            ContractionFailure::IterationLimit => "no_contraction:iteration_limit",
        }
        .to_string(),
        other => other.to_string(),
    }
}

fn solve_entry(problem: &LimitProblem, config: &RateConfig, c: f64) -> Result<RateEntry, LabError> {
    match solver::solve(problem, &config.solve_config(c)) {
        Ok(r) => Ok(RateEntry {
            c,
            s: config.s,
            p: config.p,
            dim: config.dim,
            q: config.q,
            converged: true,
            norm_h1: r.norms.h1,
            norm_w1q: r.norms.w1q,
            norm_max: r.norms.intersection,
            forcing_norm: r.forcing_norm,
            iters: r.iterations,
            residual: r.residual,
            failure: None,
        }),
        Err(e @ (SolveError::NoContraction { .. } | SolveError::ResidualTooLarge { .. })) => {
            Ok(RateEntry::failed(config, c, failure_label(&e)))
        }
        Err(e) => Err(e.into()),
    }
}

/// Solves at every speed of the ladder concurrently over the shared `problem` and fits
/// `log ‖u_c − u_∞‖` against `log c` over the converged entries.
pub fn run_rate_study(problem: &LimitProblem, config: &RateConfig) -> Result<RateStudy, LabError> {
    config.check_ladder()?;
    let c0 = if config.auto_c0 {
        let report = solver::solve_auto(problem, &config.solve_config(config.c_values[0]))?;
        Some(report.config.c)
    } else {
        None
    };
    let entries = config
        .c_values
        .par_iter()
        .map(|&c| match c0 {
            Some(c0) if c < c0 => Ok(RateEntry::failed(config, c, "trimmed".into())),
            _ => solve_entry(problem, config, c),
        })
        .collect::<Result<Vec<_>, LabError>>()?;
    let excluded: Vec<f64> = entries.iter().filter(|e| !e.converged).map(|e| e.c).collect();
    let converged = entries.len() - excluded.len();
    if converged < MIN_LADDER {
        return Err(LabError::InsufficientLadder { converged, requested: entries.len() });
    }
    let (c, n): (Vec<f64>, Vec<f64>) =
        entries.iter().filter(|e| e.converged).map(|e| (e.c, e.norm_max)).unzip();
    let fit = fit_slope(&c, &n).ok_or(LabError::InsufficientLadder { converged, requested: entries.len() })?;
    Ok(RateStudy {
        config: config.clone(),
        c0,
        excluded,
        expected_exponent: config.expected_exponent(),
        verdict: verdict(config.s, config.p, fit.slope),
        fit,
        entries,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridRecord {
    pub dim: u32,
    #[serde(rename = "K")]
    pub points: usize,
    #[serde(rename = "R")]
    pub radius: f64,
    pub spacing: f64,
}

impl From<&RadialGrid> for GridRecord {
    fn from(g: &RadialGrid) -> Self {
        Self { dim: g.dim().as_u32(), points: g.points(), radius: g.radius(), spacing: g.spacing() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundRecord {
    pub method: Method,
    pub iterations: usize,
    pub residual: f64,
}

/// Frozen constants in force for the run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    /// Order-0 multiplier decay constant.
    pub c0_decay: f64,
    /// Order-1 multiplier decay constant.
    pub c1_decay: f64,
    /// Gap operator on `L^q`, and from `P_∞^{−(1−s)}`-smoothed `L^q`.
    pub gap: GapContractConstants,
}

impl Calibration {
    pub fn compute(grid: &RadialGrid, s: f64, q: f64, seed: u64) -> Result<Self, crate::Error> {
        let decay = DecayConstants::calibrate(s)?;
        Ok(Self {
            c0_decay: decay.order0,
            c1_decay: decay.order1,
            gap: GapContractConstants::calibrate(grid, s, q, seed)?,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub config: RateConfig,
    pub grid: GridRecord,
    pub seed: u64,
    pub ground_state: GroundRecord,
    pub calibration: Calibration,
    pub c0: Option<f64>,
    pub excluded: Vec<f64>,
    /// Results, kept so a replay can be checked against them.
    pub entries: Vec<RateEntry>,
    /// Unix time in milliseconds.
    pub started_unix_ms: u128,
    pub finished_unix_ms: u128,
}

pub fn unix_ms() -> u128 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_millis())
}

/// A study together with the manifest that reproduces it.
#[derive(Clone, Debug, PartialEq)]
pub struct RateRun {
    pub study: RateStudy,
    pub manifest: RunManifest,
}

/// Builds the limit problem and runs the study.
pub fn run(config: &RateConfig) -> Result<RateRun, crate::Error> {
    let started = unix_ms();
    let grid = config.grid()?;
    let problem = LimitProblem::build(config.p, &grid)?;
    run_on(&problem, config, started)
}

/// As [`run`] over an existing limit problem.
pub fn run_on(problem: &LimitProblem, config: &RateConfig, started_unix_ms: u128) -> Result<RateRun, crate::Error> {
    let grid = problem.grid();
    let study = run_rate_study(problem, config)?;
    let calibration = Calibration::compute(grid, config.s, config.q, config.seed)?;
    let ground = &problem.ground;
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.clone(),
        grid: GridRecord::from(grid),
        seed: config.seed,
        ground_state: GroundRecord {
            method: ground.method,
            iterations: ground.iterations,
            residual: ground.residual,
        },
        calibration,
        c0: study.c0,
        excluded: study.excluded.clone(),
        entries: study.entries.clone(),
        started_unix_ms,
        finished_unix_ms: unix_ms(),
    };
    Ok(RateRun { study, manifest })
}

/// Paths written by [`emit`].
#[derive(Clone, Debug, PartialEq)]
pub struct Emitted {
    pub csv: PathBuf,
    pub json: PathBuf,
    pub manifest: PathBuf,
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// Writes `<prefix>.csv`, `<prefix>.json` and `<prefix>.manifest.json`.
pub fn emit(run: &RateRun, prefix: impl AsRef<Path>) -> Result<Emitted, crate::Error> {
    let prefix = prefix.as_ref();
    let out = Emitted {
        csv: with_suffix(prefix, ".csv"),
        json: with_suffix(prefix, ".json"),
        manifest: with_suffix(prefix, ".manifest.json"),
    };
    io::write_csv(&out.csv, &CSV_HEADER, run.study.entries.iter().map(RateEntry::csv_row))?;
    io::write_json(&out.json, &run.study)?;
    io::write_json(&out.manifest, &run.manifest)?;
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplayOutcome {
    pub entries: usize,
    /// Largest relative deviation over every recorded norm.
    pub max_rel_deviation: f64,
}

fn rel_dev(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

/// Reruns the manifest's configuration and checks every norm to [`REPLAY_REL_TOL`].
pub fn replay(manifest: &RunManifest) -> Result<ReplayOutcome, crate::Error> {
    let rerun = run(&manifest.config)?;
    let mut worst = 0.0f64;
    for (orig, new) in manifest.entries.iter().zip(&rerun.study.entries) {
        for (field, a, b) in [
            ("norm_h1", orig.norm_h1, new.norm_h1),
            ("norm_w1q", orig.norm_w1q, new.norm_w1q),
            ("norm_max", orig.norm_max, new.norm_max),
        ] {
            let d = rel_dev(a, b);
            worst = worst.max(d);
            if !(d <= REPLAY_REL_TOL) || orig.converged != new.converged {
                return Err(LabError::ReplayMismatch { c: orig.c, field, original: a, replayed: b }.into());
            }
        }
    }
    if manifest.entries.len() != rerun.study.entries.len() {
        return Err(LabError::BadLadder.into());
    }
    Ok(ReplayOutcome { entries: manifest.entries.len(), max_rel_deviation: worst })
}

/// `c_list` in a config file: a comma-separated string, as on the command line, or an
/// array of numbers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpeedList {
    Text(String),
    Numbers(Vec<f64>),
}

impl SpeedList {
    pub fn values(&self) -> Result<Vec<f64>, crate::Error> {
        match self {
            Self::Numbers(v) => Ok(v.clone()),
            Self::Text(t) => parse_speed_list(t),
        }
    }
}

pub fn parse_speed_list(text: &str) -> Result<Vec<f64>, crate::Error> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| crate::Error::Usage(format!("bad light speed {t:?} in --c-list")))
        })
        .collect()
}

/// `rates` settings from flags or a JSON file, every field optional.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatesSettings {
    pub dim: Option<u32>,
    pub p: Option<f64>,
    pub s: Option<f64>,
    pub q: Option<f64>,
    pub c_list: Option<SpeedList>,
    pub auto_c0: Option<bool>,
    #[serde(rename = "K")]
    pub points: Option<usize>,
    #[serde(rename = "R")]
    pub radius: Option<f64>,
    pub delta: Option<f64>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

impl RatesSettings {
    /// Fields set in `flags` win over `self`.
    pub fn overridden_by(self, flags: RatesSettings) -> Self {
        Self {
            dim: flags.dim.or(self.dim),
            p: flags.p.or(self.p),
            s: flags.s.or(self.s),
            q: flags.q.or(self.q),
            c_list: flags.c_list.or(self.c_list),
            auto_c0: flags.auto_c0.or(self.auto_c0),
            points: flags.points.or(self.points),
            radius: flags.radius.or(self.radius),
            delta: flags.delta.or(self.delta),
            tol: flags.tol.or(self.tol),
            max_iter: flags.max_iter.or(self.max_iter),
            seed: flags.seed.or(self.seed),
            out: flags.out.or(self.out),
        }
    }

    pub fn into_config(self) -> Result<(RateConfig, Option<PathBuf>), crate::Error> {
        let missing = |name: &str| crate::Error::Usage(format!("rates needs --{name}"));
        let mut config = RateConfig::new(
            self.dim.ok_or_else(|| missing("dim"))?,
            self.p.ok_or_else(|| missing("p"))?,
            self.s.ok_or_else(|| missing("s"))?,
            self.c_list.ok_or_else(|| missing("c-list"))?.values()?,
        );
        config.q = self.q.unwrap_or(config.q);
        config.auto_c0 = self.auto_c0.unwrap_or(false);
        config.points = self.points.unwrap_or(config.points);
        config.radius = self.radius.unwrap_or(config.radius);
        config.delta = self.delta;
        config.tol = self.tol.unwrap_or(config.tol);
        config.max_iter = self.max_iter.unwrap_or(config.max_iter);
        config.seed = self.seed.unwrap_or(config.seed);
        Ok((config, self.out))
    }
}

/// Column order of the symbol-check CSV.
pub const SYMBOL_CSV_HEADER: [&str; 11] =
    ["s", "c", "xi", "p_c", "p_inf", "diff", "diff_bound", "low_ok", "high_ok", "decay0_ok", "decay1_ok"];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolPair {
    pub s: f64,
    pub c: f64,
    pub samples: usize,
    pub violations: usize,
    /// Smallest relative slack over every check, negative on a violation.
    pub worst_slack: f64,
}

/// Every pointwise symbol bound over a log-spaced sweep for each `(s, c)`, with decay
/// constants frozen per `s`. Rows go to `out` as CSV when given.
pub fn symbol_check(
    s_values: &[f64],
    c_values: &[f64],
    xi_min: f64,
    xi_max: f64,
    samples: usize,
    out: Option<&Path>,
) -> Result<Vec<SymbolPair>, crate::Error> {
    use pseudorel_core::symbols::{log_spaced, sweep, SymbolSample};
    use pseudorel_core::SymbolParams;

    if !(xi_min > 0.0 && xi_max > xi_min) || samples < 2 {
        return Err(crate::Error::Usage("need 0 < xi-min < xi-max and at least 2 samples".into()));
    }
    let mut pairs = Vec::new();
    let mut rows = Vec::new();
    for &s in s_values {
        let constants = DecayConstants::calibrate(s)?;
        for &c in c_values {
            let params = SymbolParams::normalized(s, c)?;
            let summary = sweep(&params, xi_min, xi_max, samples, &constants);
            let worst = [summary.low, summary.high, summary.diff, summary.decay0, summary.decay1]
                .iter()
                .filter(|r| r.samples > 0)
                .map(|r| r.worst_slack)
                .fold(f64::INFINITY, f64::min);
            pairs.push(SymbolPair { s, c, samples, violations: summary.violations(), worst_slack: worst });
            if out.is_some() {
                let flag = |r: &Option<Result<f64, _>>| match r {
                    None => Cell::Empty,
                    Some(r) => Cell::Bool(r.is_ok()),
                };
                for xi in log_spaced(xi_min, xi_max, samples) {
                    let x = SymbolSample::evaluate(xi, &params, &constants);
                    rows.push(vec![
                        Cell::Num(s),
                        Cell::Num(c),
                        Cell::Num(xi),
                        Cell::Num(x.p_c),
                        Cell::Num(x.p_inf),
                        Cell::Num(x.diff),
                        Cell::Num(x.diff_bound),
                        flag(&x.low),
                        flag(&x.high),
                        Cell::Bool(x.decay0.is_ok()),
                        flag(&x.decay1),
                    ]);
                }
            }
        }
    }
    if let Some(path) = out {
        io::write_csv(path, &SYMBOL_CSV_HEADER, rows)?;
    }
    Ok(pairs)
}
