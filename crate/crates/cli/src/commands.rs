use std::io::Write;
use std::path::{Path, PathBuf};

use starfw::solver::{replay_bound_inputs, solve, INFLATION, RHO_SAMPLES};
use starfw::verify::{
    audit_all, check_star_convexity, estimate_lipschitz, find_convexity_violation, gradient_fd_error,
    BoundAuditReport,
};
use starfw::{Problem, ProblemSpec, RunReport, SolverConfig, StrategyKind, Termination};

use crate::error::CliError;
use crate::output::{create_dir, fmt_f64, write_file, write_run, ReportFile};
use crate::spec::{read_json, read_problem, ExperimentSpec, SuiteSpec};

pub const DEFAULT_OUT: &str = "starfw-out";
pub const DEFAULT_CHECK_SAMPLES: usize = 2_000;
const CHECK_LAMBDAS: usize = 101;
const CHECK_TOL: f64 = 1e-9;
const FD_POINTS: usize = 100;
const FD_STEP: f64 = 1e-6;

macro_rules! say {
    ($out:expr, $($arg:tt)*) => {
        writeln!($out, $($arg)*).map_err(|e| CliError::Runtime(format!("writing output: {e}")))?
    };
}

#[derive(Debug, Clone, Default)]
pub struct RunArgs {
    pub spec: PathBuf,
    pub strategy: Option<StrategyKind>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default)]
pub struct BenchArgs {
    pub suite: PathBuf,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default)]
pub struct CheckArgs {
    pub spec: PathBuf,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
}

fn fmt_vec(x: &[f64]) -> String {
    let parts: Vec<String> = x.iter().map(|v| format!("{v:.6}")).collect();
    format!("[{}]", parts.join(", "))
}

/// Bound audits for a finished run. A sampled Lipschitz estimate, inflated
/// like ρ, stands in when neither the configuration nor the objective
/// supplies one.
pub fn audit_run(problem: &Problem, report: &RunReport) -> Result<Vec<BoundAuditReport>, CliError> {
    let (obj, set) = (problem.objective.as_ref(), problem.set.as_ref());
    let needs_estimate =
        report.l_used.or(report.config.l).is_none() && obj.lipschitz_on(set).is_none();
    let l_estimate = if needs_estimate {
        Some(INFLATION * estimate_lipschitz(obj, set, RHO_SAMPLES, report.config.seed)?)
    } else {
        None
    };
    let inputs = replay_bound_inputs(report, obj, set, l_estimate)?;
    Ok(audit_all(report, &inputs, problem.optimal_value())?)
}

fn summary_line(strategy: StrategyKind, run: &RunReport) -> String {
    let last = run.last();
    format!(
        "{strategy}: f={} gap={:.3e} iters={} fevals={} termination={}",
        fmt_f64(last.f),
        last.gap,
        last.k,
        run.total_fevals(),
        run.termination.as_str()
    )
}

pub fn cmd_run(args: &RunArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let spec: ExperimentSpec = read_json(&args.spec)?;
    let strategies = match args.strategy {
        Some(s) => vec![s],
        None => spec.strategies.clone(),
    };
    if strategies.is_empty() {
        return Err(CliError::Usage(
            "strategies: at least one strategy is required (or pass --strategy)".into(),
        ));
    }
    let problem = spec.problem.build()?;
    let seed = args.seed.or(spec.seed).unwrap_or(spec.config.seed);
    let root = args
        .out
        .clone()
        .or_else(|| spec.out.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    let mut failures = Vec::new();
    for strategy in strategies {
        let config = spec.problem.configure(&SolverConfig {
            strategy,
            seed,
            ..spec.config.clone()
        });
        let run = solve(problem.objective.as_ref(), problem.set.as_ref(), &config)?;
        say!(out, "{}", summary_line(strategy, &run));
        if run.termination == Termination::LineSearchFailure {
            failures.push(format!(
                "{strategy}: {}",
                run.failure.as_deref().unwrap_or("line search failure")
            ));
        }
        let file = ReportFile {
            problem: spec.problem.clone(),
            run,
            audits: Vec::new(),
        };
        write_run(&root.join(strategy.as_str()), &file, &[])?;
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Runtime(failures.join("; ")))
    }
}

/// Least-squares slope of `ln(f − f*)` against `ln k` over the last decade
/// `K/10 <= k <= K` of the trace, skipping points with `f <= f*`.
pub fn decade_slope(run: &RunReport, f_star: f64) -> Option<f64> {
    let last = run.last().k;
    let pts: Vec<(f64, f64)> = run
        .records
        .iter()
        .filter(|r| r.k >= 1 && 10 * r.k >= last && r.f > f_star)
        .map(|r| ((r.k as f64).ln(), (r.f - f_star).ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// One row of `summary.csv`.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BenchRow {
    pub problem: String,
    pub strategy: String,
    pub k_to_tol: Option<usize>,
    pub final_gap: Option<f64>,
    pub fevals: Option<u64>,
    pub slope: Option<f64>,
    pub audits_passed: Option<bool>,
    pub error: Option<String>,
}

impl BenchRow {
    fn failed(problem: &str, strategy: StrategyKind, error: String) -> Self {
        Self {
            problem: problem.to_string(),
            strategy: strategy.to_string(),
            k_to_tol: None,
            final_gap: None,
            fevals: None,
            slope: None,
            audits_passed: None,
            error: Some(error),
        }
    }

    pub fn ok(&self) -> bool {
        self.error.is_none() && self.audits_passed != Some(false)
    }
}

fn bench_one(
    name: &str,
    spec: &ProblemSpec,
    config: &SolverConfig,
    dir: &Path,
) -> BenchRow {
    let strategy = config.strategy;
    let attempt = || -> Result<BenchRow, CliError> {
        let problem = spec.build()?;
        let run = solve(problem.objective.as_ref(), problem.set.as_ref(), config)?;
        let audits = audit_run(&problem, &run)?;
        let f_star = problem.optimal_value();
        let last = run.last();
        let mut row = BenchRow {
            problem: name.to_string(),
            strategy: strategy.to_string(),
            k_to_tol: (run.termination == Termination::GapTolReached).then_some(last.k),
            final_gap: Some(last.gap),
            fevals: Some(run.total_fevals()),
            slope: f_star.and_then(|f| decade_slope(&run, f)),
            audits_passed: (!audits.is_empty()).then(|| audits.iter().all(|a| a.passed)),
            error: None,
        };
        if run.termination == Termination::LineSearchFailure {
            row.error = run.failure.clone();
        } else if row.audits_passed == Some(false) {
            let failed: Vec<&str> = audits.iter().filter(|a| !a.passed).map(|a| a.name.as_str()).collect();
            row.error = Some(format!("audit failed: {}", failed.join(" ")));
        }
        let mut file = ReportFile {
            problem: spec.clone(),
            run,
            audits: Vec::new(),
        };
        file.merge_audits(&audits);
        write_run(dir, &file, &audits)?;
        Ok(row)
    };
    attempt().unwrap_or_else(|e| BenchRow::failed(name, strategy, e.to_string()))
}

fn summary_csv(rows: &[BenchRow]) -> Result<Vec<u8>, CliError> {
    let csv_err = |e: csv::Error| CliError::Runtime(format!("writing summary: {e}"));
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "problem", "strategy", "k_to_tol", "final_gap", "fevals", "slope", "audits_passed", "error",
    ])
    .map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.problem.clone(),
            r.strategy.clone(),
            r.k_to_tol.map(|k| k.to_string()).unwrap_or_default(),
            r.final_gap.map(fmt_f64).unwrap_or_default(),
            r.fevals.map(|k| k.to_string()).unwrap_or_default(),
            r.slope.map(fmt_f64).unwrap_or_default(),
            r.audits_passed.map(|b| b.to_string()).unwrap_or_default(),
            r.error.clone().unwrap_or_default(),
        ])
        .map_err(csv_err)?;
    }
    w.into_inner()
        .map_err(|e| CliError::Runtime(format!("writing summary: {e}")))
}

pub fn cmd_bench(args: &BenchArgs, out: &mut dyn Write) -> Result<Vec<BenchRow>, CliError> {
    let suite: SuiteSpec = read_json(&args.suite)?;
    if suite.problems.is_empty() || suite.strategies.is_empty() {
        return Err(CliError::Usage(
            "suite is empty: it needs at least one problem and one strategy".into(),
        ));
    }
    let root = args
        .out
        .clone()
        .or_else(|| suite.out.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    let seed = args.seed.or(suite.seed).unwrap_or(suite.config.seed);
    let workers = args.workers.or(suite.workers).unwrap_or(1).max(1);

    let mut jobs = Vec::new();
    for (i, p) in suite.problems.iter().enumerate() {
        let name = p.name.clone().unwrap_or_else(|| format!("problem{i}"));
        for &strategy in &suite.strategies {
            let config = p.configure(&SolverConfig {
                strategy,
                seed,
                ..suite.config.clone()
            });
            let dir = root.join(&name).join(strategy.as_str());
            jobs.push((name.clone(), p, config, dir));
        }
    }
    let mut rows: Vec<Option<BenchRow>> = vec![None; jobs.len()];
    let next = std::sync::atomic::AtomicUsize::new(0);
    let results = std::sync::Mutex::new(&mut rows);
    std::thread::scope(|scope| {
        for _ in 0..workers.min(jobs.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                let Some((name, spec, config, dir)) = jobs.get(i) else { break };
                let row = bench_one(name, spec, config, dir);
                results.lock().expect("bench worker panicked")[i] = Some(row);
            });
        }
    });
    let rows: Vec<BenchRow> = rows.into_iter().map(|r| r.expect("every job ran")).collect();

    create_dir(&root)?;
    write_file(&root.join("summary.csv"), &summary_csv(&rows)?)?;
    for r in &rows {
        let slope = r.slope.map(|s| format!("{s:.3}")).unwrap_or_else(|| "-".into());
        let status = match (&r.error, r.audits_passed) {
            (Some(e), _) => format!("FAILED ({e})"),
            (None, Some(true)) => "audits PASS".into(),
            (None, _) => "ok".into(),
        };
        say!(out, "{} / {}: slope {slope}, {status}", r.problem, r.strategy);
    }
    let failed = rows.iter().filter(|r| !r.ok()).count();
    if failed > 0 {
        return Err(CliError::Runtime(format!("{failed} of {} runs failed", rows.len())));
    }
    Ok(rows)
}

pub fn cmd_check(args: &CheckArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let spec = read_problem(&args.spec)?;
    let problem = spec.build()?;
    let (obj, set) = (problem.objective.as_ref(), problem.set.as_ref());
    let n = args.samples.unwrap_or(DEFAULT_CHECK_SAMPLES).max(1);
    let seed = args.seed.unwrap_or(0);
    say!(out, "objective: {} on {} (dim {})", obj.name(), set.kind(), set.dim());

    match find_convexity_violation(obj, set, n, seed) {
        Ok(Some(w)) => say!(
            out,
            "convex: no (witness x={} y={} excess={:.3e})",
            fmt_vec(&w.x),
            fmt_vec(&w.y),
            w.excess
        ),
        Ok(None) => say!(out, "convex: no violation found in {n} pairs"),
        Err(e) => say!(out, "convex: unavailable ({e})"),
    }
    match estimate_lipschitz(obj, set, n, seed) {
        Ok(l) => match obj.lipschitz_on(set) {
            Some(a) => say!(out, "lipschitz: sampled estimate {l:.6e} (analytic bound {a:.6e})"),
            None => say!(out, "lipschitz: sampled estimate {l:.6e}"),
        },
        Err(e) => say!(out, "lipschitz: unavailable ({e})"),
    }
    match gradient_fd_error(obj, set, FD_POINTS, FD_STEP, seed) {
        Ok(err) => say!(out, "gradient: max finite-difference error {err:.3e} over {FD_POINTS} points"),
        Err(e) => say!(out, "gradient: unavailable ({e})"),
    }

    let Some(x_star) = problem.minimizer() else {
        say!(out, "star-convex: not checked");
        return Err(CliError::Usage(
            "no minimizer declared: add `x_star` to the problem to run the star-convexity check".into(),
        ));
    };
    let report = check_star_convexity(obj, set, &x_star, n, CHECK_LAMBDAS, CHECK_TOL, seed)?;
    if report.passed() {
        say!(
            out,
            "star-convex: pass ({n} samples x {CHECK_LAMBDAS} lambdas, tol {CHECK_TOL:e}, x* = {})",
            fmt_vec(&x_star)
        );
        Ok(())
    } else {
        say!(
            out,
            "star-convex: FAIL ({} secant violations, max excess {:.3e}; {} points below f(x*); x* = {})",
            report.n_violations,
            report.max_violation,
            report.n_below_minimum,
            fmt_vec(&x_star)
        );
        if let Some((x, f)) = &report.lowest {
            say!(out, "  lowest point x={} f={f:.6e}", fmt_vec(x));
        }
        for v in report.violations.iter().take(5) {
            say!(
                out,
                "  x={} lambda={:.3} lhs={:.6e} rhs={:.6e}",
                fmt_vec(&v.x),
                v.lambda,
                v.lhs,
                v.rhs
            );
        }
        Err(CliError::Usage("star-convexity check failed for the declared minimizer".into()))
    }
}

pub fn cmd_audit(report_path: &Path, out: &mut dyn Write) -> Result<Vec<BoundAuditReport>, CliError> {
    let mut file: ReportFile = read_json(report_path)?;
    let problem = file.problem.build()?;
    let audits = audit_run(&problem, &file.run)?;
    let dir = report_path.parent().unwrap_or(Path::new("."));
    for a in &audits {
        write_file(&dir.join(format!("audit_{}.csv", a.name)), a.details_csv().as_bytes())?;
        match a.first_violation_k {
            None => say!(out, "{}: PASS", a.name),
            Some(k) => say!(out, "{}: FAIL (first_violation_k={k})", a.name),
        }
        if let Some(note) = &a.note {
            say!(out, "  note: {note}");
        }
    }
    if problem.optimal_value().is_none() {
        say!(out, "rate audits skipped: optimal value unknown (declare f_star or x_star)");
    }
    file.merge_audits(&audits);
    let json = serde_json::to_vec_pretty(&file)
        .map_err(|e| CliError::Runtime(format!("serializing report: {e}")))?;
    write_file(report_path, &json)?;
    let failed: Vec<&str> = audits.iter().filter(|a| !a.passed).map(|a| a.name.as_str()).collect();
    if failed.is_empty() {
        Ok(audits)
    } else {
        Err(CliError::Runtime(format!("audits failed: {}", failed.join(", "))))
    }
}
