use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pseudorel::error::SolveError;
use pseudorel::groundstate::{ground_state, DEFAULT_TOL as GROUND_TOL};
use pseudorel::identities::{pohozaev, SignObstruction};
use pseudorel::io::{read_json, write_json};
use pseudorel::lab::{self, RatesSettings, RunManifest, SpeedList};
use pseudorel::radial::RadialGrid;
use pseudorel::solver::{self, LimitProblem, SolveConfig, SolveReport};
use pseudorel::Error;
use pseudorel_core::existence::{fractional_critical_exponent, local_critical_exponent};
use pseudorel_core::{classify_existence, ExistenceRegime, SymbolParams};

/// Radial spectral solver for the pseudorelativistic Schrödinger equation at large
/// light speed.
#[derive(Parser)]
#[command(name = "pseudorel", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Pointwise symbol bounds.
    Symbols {
        #[command(subcommand)]
        action: SymbolsAction,
    },
    /// Limit ground state of −Δu + u = u^p.
    Groundstate(GroundArgs),
    /// Contraction solve at one light speed.
    Solve(SolveArgs),
    /// Pohozaev functional of a solve report.
    Pohozaev {
        #[arg(long)]
        input: PathBuf,
    },
    /// Existence regime of (N, s, p, m, μ, c).
    Classify(ClassifyArgs),
    /// Convergence rate study over a light-speed ladder.
    Rates(RatesArgs),
    /// Rerun a rate-study manifest and compare every norm.
    Replay {
        #[arg(long)]
        manifest: PathBuf,
    },
}

#[derive(Subcommand)]
enum SymbolsAction {
    Check(SymbolsArgs),
}

#[derive(Args)]
struct SymbolsArgs {
    #[arg(long, value_delimiter = ',', default_value = "0.6,0.75,0.9")]
    s: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "2,10,100")]
    c: Vec<f64>,
    #[arg(long, default_value_t = 1e-3)]
    xi_min: f64,
    #[arg(long, default_value_t = 1e6)]
    xi_max: f64,
    #[arg(long, default_value_t = 2000)]
    samples: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GroundArgs {
    #[arg(long)]
    dim: u32,
    #[arg(long)]
    p: f64,
    #[arg(long = "K", default_value_t = lab::DEFAULT_POINTS)]
    points: usize,
    #[arg(long = "R", default_value_t = lab::DEFAULT_RADIUS)]
    radius: f64,
    #[arg(long, default_value_t = GROUND_TOL)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    dim: u32,
    #[arg(long)]
    p: f64,
    #[arg(long)]
    s: f64,
    #[arg(long)]
    c: f64,
    #[arg(long, default_value_t = solver::DEFAULT_Q)]
    q: f64,
    /// Ball radius; defaults to min(0.5, ‖u_∞‖_{H¹}/2).
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long = "K", default_value_t = lab::DEFAULT_POINTS)]
    points: usize,
    #[arg(long = "R", default_value_t = lab::DEFAULT_RADIUS)]
    radius: f64,
    #[arg(long, default_value_t = solver::DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = solver::DEFAULT_MAX_ITER)]
    max_iter: usize,
    /// Walk c upward by 1.5 until the contraction succeeds.
    #[arg(long)]
    auto_c0: bool,
    #[arg(long, default_value_t = solver::LIPSCHITZ_PAIRS)]
    lipschitz_pairs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ClassifyArgs {
    #[arg(long)]
    dim: u32,
    #[arg(long)]
    s: f64,
    #[arg(long)]
    p: f64,
    #[arg(long)]
    m: f64,
    #[arg(long)]
    mu: f64,
    #[arg(long)]
    c: f64,
}

#[derive(Args)]
struct RatesArgs {
    /// JSON file with the same keys as the flags; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    dim: Option<u32>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    s: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    c_list: Option<String>,
    #[arg(long)]
    auto_c0: bool,
    #[arg(long = "K")]
    points: Option<usize>,
    #[arg(long = "R")]
    radius: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output prefix for `.csv`, `.json` and `.manifest.json`.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RatesArgs {
    fn settings(&self) -> RatesSettings {
        RatesSettings {
            dim: self.dim,
            p: self.p,
            s: self.s,
            q: self.q,
            c_list: self.c_list.clone().map(SpeedList::Text),
            auto_c0: self.auto_c0.then_some(true),
            points: self.points,
            radius: self.radius,
            delta: self.delta,
            tol: self.tol,
            max_iter: self.max_iter,
            seed: self.seed,
            out: self.out.clone(),
        }
    }
}

fn symbols_check(a: SymbolsArgs) -> Result<ExitCode, Error> {
    let pairs = lab::symbol_check(&a.s, &a.c, a.xi_min, a.xi_max, a.samples, a.out.as_deref())?;
    let mut total = 0;
    for p in &pairs {
        println!("s={} c={} samples={} violations={} worst_slack={:e}", p.s, p.c, p.samples, p.violations, p.worst_slack);
        total += p.violations;
    }
    println!("violations={total}");
    Ok(if total == 0 { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn groundstate(a: GroundArgs) -> Result<ExitCode, Error> {
    let grid = RadialGrid::new(a.dim, a.points, a.radius)?;
    let u = ground_state(a.p, &grid, a.tol)?;
    println!("method={:?} iterations={} peak={:e}", u.method, u.iterations, u.field.values()[0]);
    println!("residual={:e}", u.residual);
    if let Some(out) = a.out {
        write_json(out, &u.field)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn report_obstruction(dim: u32, p: f64, s: f64, c: f64) -> Result<(), Error> {
    let params = SymbolParams::normalized(s, c)?;
    let regime = classify_existence(dim, s, p, params.mass(), params.shift(), c)?;
    let obstruction = SignObstruction::new(dim, p, &params);
    println!("regime={regime} kappa={:e}", obstruction.kappa);
    if regime == ExistenceRegime::Nonexistence {
        println!(
            "sign obstruction: 1/(p+1) - (N-2s)/(2N) = {:e} <= 0 with kappa >= 0; \
             no nontrivial solution exists, consistent with the failed contraction",
            obstruction.coefficient
        );
    }
    Ok(())
}

fn solve(a: SolveArgs) -> Result<ExitCode, Error> {
    let grid = RadialGrid::new(a.dim, a.points, a.radius)?;
    let problem = LimitProblem::build(a.p, &grid)?;
    let config = SolveConfig {
        q: a.q,
        delta: a.delta,
        tol: a.tol,
        max_iter: a.max_iter,
        lipschitz_pairs: a.lipschitz_pairs,
        seed: a.seed,
        ..SolveConfig::new(a.s, a.c, a.p)
    };
    let result = if a.auto_c0 { solver::solve_auto(&problem, &config) } else { solver::solve(&problem, &config) };
    match result {
        Ok(report) => {
            for t in &report.attempts {
                println!("attempt c={} failed: {:?}", t.c, t.cause);
            }
            println!(
                "converged c={} iterations={} final_step={:e} norm={:e}",
                report.config.c, report.iterations, report.final_step, report.norms.intersection
            );
            if let Some(l) = report.lipschitz_probe {
                println!("lipschitz={l:e}");
            }
            println!("residual={:e}", report.residual);
            if let Some(out) = a.out {
                write_json(out, &report)?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Err(SolveError::NoContraction { c, cause }) => {
            println!("NoContraction c={c} cause={cause:?}; increase c");
            report_obstruction(a.dim, a.p, a.s, c)?;
            Ok(ExitCode::from(2))
        }
        Err(e) => Err(e.into()),
    }
}

fn pohozaev_cmd(input: PathBuf) -> Result<ExitCode, Error> {
    let report: SolveReport = read_json(input)?;
    let params = report.params()?;
    let r = pohozaev(&report.u_c, report.config.p, &params);
    println!("pohozaev={:e}", r.value);
    println!("relative={:e}", r.relative);
    Ok(ExitCode::SUCCESS)
}

fn classify(a: ClassifyArgs) -> Result<ExitCode, Error> {
    let regime = classify_existence(a.dim, a.s, a.p, a.m, a.mu, a.c)?;
    let params = SymbolParams::general(a.s, a.c, a.m, a.mu)?;
    let obstruction = SignObstruction::new(a.dim, a.p, &params);
    println!("regime={regime}");
    println!("kappa={:e}", params.kappa());
    println!("fractional_critical={}", fractional_critical_exponent(a.dim, a.s));
    println!("local_critical={}", local_critical_exponent(a.dim));
    println!("sign_coefficient={:e}", obstruction.coefficient);
    Ok(ExitCode::SUCCESS)
}

fn rates(a: RatesArgs) -> Result<ExitCode, Error> {
    let file = match &a.config {
        Some(path) => read_json::<RatesSettings>(path)?,
        None => RatesSettings::default(),
    };
    let (config, out) = file.overridden_by(a.settings()).into_config()?;
    let run = lab::run(&config)?;
    for e in &run.study.entries {
        match &e.failure {
            None => println!("c={} norm={:e} iters={} residual={:e}", e.c, e.norm_max, e.iters, e.residual),
            Some(f) => println!("c={} excluded ({f})", e.c),
        }
    }
    let v = run.study.verdict;
    println!("slope={} expected={} verdict={}", v.slope, v.expected, if v.passed { "pass" } else { "fail" });
    if let Some(prefix) = out {
        let files = lab::emit(&run, prefix)?;
        println!("wrote {} {} {}", files.csv.display(), files.json.display(), files.manifest.display());
    }
    Ok(if v.passed { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn replay(path: PathBuf) -> Result<ExitCode, Error> {
    let manifest: RunManifest = read_json(path)?;
    let outcome = lab::replay(&manifest)?;
    println!("replayed {} entries, max relative deviation {:e}", outcome.entries, outcome.max_rel_deviation);
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Symbols { action: SymbolsAction::Check(a) } => symbols_check(a),
        Command::Groundstate(a) => groundstate(a),
        Command::Solve(a) => solve(a),
        Command::Pohozaev { input } => pohozaev_cmd(input),
        Command::Classify(a) => classify(a),
        Command::Rates(a) => rates(a),
        Command::Replay { manifest } => replay(manifest),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::FAILURE
    })
}
