//! The Frank–Wolfe loop: oracle call, gap test, stepsize, convex update.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::FeasibleSet;
use crate::linalg::{axpy, check_dim, dot, norm_sq, sub};
use crate::objectives::Objective;
use crate::stepsizes::{
    AdaptiveLipschitzState, ArmijoState, KnownLipschitzRule, StepContext, Stepsize, StrategyKind,
    DEFAULT_MAX_BACKTRACKS,
};
use crate::verify::estimate_gradient_bound;

fn default_max_iters() -> usize {
    1000
}
fn default_gap_tol() -> f64 {
    1e-8
}
fn default_feasibility_tol() -> f64 {
    1e-9
}
fn default_zeta() -> f64 {
    0.1
}
fn default_beta() -> f64 {
    0.5
}
fn default_l0() -> f64 {
    1.0
}
fn default_max_backtracks() -> u32 {
    DEFAULT_MAX_BACKTRACKS
}
fn default_strategy() -> StrategyKind {
    StrategyKind::Armijo
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default = "default_strategy")]
    pub strategy: StrategyKind,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    /// Stop once `|ω(x^k)| <= gap_tol`.
    #[serde(default = "default_gap_tol")]
    pub gap_tol: f64,
    #[serde(default = "default_feasibility_tol")]
    pub feasibility_tol: f64,
    #[serde(default = "default_zeta")]
    pub zeta: f64,
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(default = "default_l0")]
    pub l0: f64,
    /// Lipschitz constant for the `known-l` rule; taken from the objective
    /// when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l: Option<f64>,
    #[serde(default = "default_max_backtracks")]
    pub max_backtracks: u32,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            strategy: default_strategy(),
            max_iters: default_max_iters(),
            gap_tol: default_gap_tol(),
            feasibility_tol: default_feasibility_tol(),
            zeta: default_zeta(),
            beta: default_beta(),
            l0: default_l0(),
            l: None,
            max_backtracks: default_max_backtracks(),
            seed: 0,
            x0: None,
        }
    }
}

impl SolverConfig {
    pub fn with_strategy(strategy: StrategyKind) -> Self {
        Self {
            strategy,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iters < 1 {
            return Err(Error::invalid("max_iters", "must be at least 1"));
        }
        for (key, v) in [("gap_tol", self.gap_tol), ("feasibility_tol", self.feasibility_tol)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::invalid(key, "must be a finite nonnegative number"));
            }
        }
        Ok(())
    }

    fn build_rule(&self, objective: &dyn Objective, set: &dyn FeasibleSet) -> Result<Stepsize> {
        Ok(match self.strategy {
            StrategyKind::Armijo => {
                let mut s = ArmijoState::new(self.beta, self.zeta)?;
                s.max_backtracks = self.max_backtracks;
                Stepsize::Armijo(s)
            }
            StrategyKind::Adaptive => {
                let mut s = AdaptiveLipschitzState::new(self.l0)?;
                s.max_doublings = self.max_backtracks;
                Stepsize::Adaptive(s)
            }
            StrategyKind::KnownL => {
                let l = self.l.or_else(|| objective.lipschitz_on(set)).ok_or_else(|| {
                    Error::MissingConstant(format!(
                        "the known-l rule needs `l`; {} declares no Lipschitz constant",
                        objective.name()
                    ))
                })?;
                Stepsize::KnownL(KnownLipschitzRule::new(l)?)
            }
            StrategyKind::Diminishing => Stepsize::Diminishing,
        })
    }
}

/// One row of the trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub k: usize,
    pub f: f64,
    /// `min(ω(x^k), 0)`.
    pub gap: f64,
    /// Stepsize taken from `x^k`; absent on the final row.
    pub lambda: Option<f64>,
    #[serde(rename = "L_est")]
    pub l_est: Option<f64>,
    pub fevals_iter: u64,
    pub fevals_cum: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    GapTolReached,
    MaxIters,
    LineSearchFailure,
}

impl Termination {
    pub fn as_str(&self) -> &'static str {
        match self {
            Termination::GapTolReached => "gap_tol_reached",
            Termination::MaxIters => "max_iters",
            Termination::LineSearchFailure => "line_search_failure",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: SolverConfig,
    pub termination: Termination,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
    pub final_x: Vec<f64>,
    pub wall_time_ms: f64,
    /// Lipschitz constant used by the `known-l` rule.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l_used: Option<f64>,
    /// Armijo only: how many times the grown trial stepsize was capped at 1.
    #[serde(default)]
    pub trial_clamps: usize,
    pub records: Vec<IterationRecord>,
}

impl RunReport {
    pub fn strategy(&self) -> StrategyKind {
        self.config.strategy
    }

    pub fn last(&self) -> &IterationRecord {
        self.records.last().expect("reports always hold at least one record")
    }

    pub fn total_fevals(&self) -> u64 {
        self.last().fevals_cum
    }
}

/// Oracle point and gap at `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct GapInfo {
    /// Raw `∇f(x)ᵀ(p − x)`; may exceed 0 by rounding noise.
    pub omega: f64,
    pub p: Vec<f64>,
    pub grad: Vec<f64>,
}

pub fn gap(
    objective: &dyn Objective,
    set: &dyn FeasibleSet,
    x: &[f64],
    feasibility_tol: f64,
) -> Result<GapInfo> {
    check_dim(set.dim(), x.len())?;
    let violation = set.violation(x);
    if !(violation <= feasibility_tol) {
        return Err(Error::Infeasible {
            violation,
            tol: feasibility_tol,
        });
    }
    let grad = objective.gradient(x)?;
    let p = set.lmo(&grad)?;
    let omega = dot(&grad, &sub(&p, x));
    Ok(GapInfo { omega, p, grad })
}

pub fn solve(
    objective: &dyn Objective,
    set: &dyn FeasibleSet,
    config: &SolverConfig,
) -> Result<RunReport> {
    if objective.checker_only() {
        return Err(Error::CheckerOnly(objective.name().to_string()));
    }
    if let Some(n) = objective.dim() {
        check_dim(n, set.dim())?;
    }
    config.validate()?;
    let mut rule = config.build_rule(objective, set)?;
    let l_used = match rule {
        Stepsize::KnownL(r) => Some(r.l),
        _ => None,
    };

    let mut x = match &config.x0 {
        Some(x0) => {
            check_dim(set.dim(), x0.len())?;
            x0.clone()
        }
        None => set.sample(config.seed),
    };

    let started = Instant::now();
    let mut f = objective.value(&x)?;
    let mut records = Vec::new();
    let mut fevals_cum = 0u64;
    let mut trial_clamps = 0usize;
    let mut failure = None;

    let mut k = 0usize;
    let termination = loop {
        let l_est = rule.l_estimate();
        let info = gap(objective, set, &x, config.feasibility_tol)?;
        let omega = info.omega.min(0.0);
        let d = sub(&info.p, &x);
        let mut record = IterationRecord {
            k,
            f,
            gap: omega,
            lambda: None,
            l_est,
            fevals_iter: 0,
            fevals_cum,
        };
        if omega.abs() <= config.gap_tol || norm_sq(&d) == 0.0 {
            records.push(record);
            break Termination::GapTolReached;
        }
        if k == config.max_iters {
            records.push(record);
            break Termination::MaxIters;
        }
        let ctx = StepContext {
            x: &x,
            d: &d,
            gap: omega,
            k,
            objective,
            f_x: f,
        };
        match rule.step(&ctx) {
            Ok(out) => {
                let x_next = axpy(&x, out.lambda, &d);
                let f_next = match out.f_next {
                    Some(v) => v,
                    None => objective.value(&x_next)?,
                };
                fevals_cum += u64::from(out.f_evals);
                trial_clamps += usize::from(out.trial_clamped);
                record.lambda = Some(out.lambda);
                record.fevals_iter = u64::from(out.f_evals);
                record.fevals_cum = fevals_cum;
                records.push(record);
                x = x_next;
                f = f_next;
            }
            Err(e @ (Error::LineSearchFailure { tries, .. } | Error::EstimationFailure { tries, .. })) => {
                fevals_cum += u64::from(tries) + 1;
                record.fevals_iter = u64::from(tries) + 1;
                record.fevals_cum = fevals_cum;
                records.push(record);
                failure = Some(e.to_string());
                break Termination::LineSearchFailure;
            }
            Err(e) => return Err(e),
        }
        k += 1;
    };

    Ok(RunReport {
        config: config.clone(),
        termination,
        failure,
        final_x: x,
        wall_time_ms: started.elapsed().as_secs_f64() * 1e3,
        l_used,
        trial_clamps,
        records,
    })
}

/// Where the Lipschitz constant fed to the bound audits came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LipschitzSource {
    /// `l` given in the run configuration.
    Configured,
    /// Analytic constant declared by the objective.
    Analytic,
    /// Sampled estimate supplied by the caller (already inflated).
    Estimated,
}

/// Constants needed to evaluate the complexity bounds for a finished run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub diam: f64,
    pub l: f64,
    pub l_source: LipschitzSource,
    pub l0: f64,
    pub zeta: f64,
    pub beta: f64,
    /// Inflated sampled bound on `‖∇f‖` over the set (Armijo runs only).
    pub rho: Option<f64>,
    /// Armijo stepsize-bound constant; absent for other rules.
    pub gamma: Option<f64>,
}

pub const RHO_SAMPLES: usize = 10_000;
pub const INFLATION: f64 = 1.1;

/// `γ = min{1 / (ρ diam), 2(1 − ζ) / (β L diam²)}`.
pub fn gamma_constant(rho: f64, diam: f64, zeta: f64, beta: f64, l: f64) -> f64 {
    let first = 1.0 / (rho * diam);
    let second = 2.0 * (1.0 - zeta) / (beta * l * diam * diam);
    first.min(second)
}

/// Collects the bound constants for `report`.
///
/// The Lipschitz constant is taken from the run configuration, then from the
/// objective's analytic value, then from `l_estimate` (a sampled estimate the
/// caller has already inflated). `ρ` is the sampled maximum of `‖∇f‖` over
/// the set inflated by 10%.
pub fn replay_bound_inputs(
    report: &RunReport,
    objective: &dyn Objective,
    set: &dyn FeasibleSet,
    l_estimate: Option<f64>,
) -> Result<BoundInputs> {
    let cfg = &report.config;
    let (l, l_source) = if let Some(l) = report.l_used.or(cfg.l) {
        (l, LipschitzSource::Configured)
    } else if let Some(l) = objective.lipschitz_on(set) {
        (l, LipschitzSource::Analytic)
    } else if let Some(l) = l_estimate {
        (l, LipschitzSource::Estimated)
    } else {
        return Err(Error::MissingConstant(format!(
            "no Lipschitz constant for {}; run estimate_lipschitz and pass the inflated estimate",
            objective.name()
        )));
    };
    let diam = set.diameter();
    let (rho, gamma) = if cfg.strategy == StrategyKind::Armijo {
        let rho = INFLATION * estimate_gradient_bound(objective, set, RHO_SAMPLES, cfg.seed)?;
        (Some(rho), Some(gamma_constant(rho, diam, cfg.zeta, cfg.beta, l)))
    } else {
        (None, None)
    };
    Ok(BoundInputs {
        diam,
        l,
        l_source,
        l0: cfg.l0,
        zeta: cfg.zeta,
        beta: cfg.beta,
        rho,
        gamma,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{BoxSet, ProbabilitySimplex};
    use crate::objectives::{HomogeneousPower, Quadratic, QuarticCross};

    fn half_sq(n: usize) -> Quadratic {
        Quadratic::squared_distance(&vec![0.0; n]).unwrap()
    }

    #[test]
    fn gap_on_unit_interval() {
        let set = BoxSet::cube(1, -1.0, 1.0).unwrap();
        let g = gap(&half_sq(1), &set, &[1.0], 0.0).unwrap();
        assert_eq!(g.omega, -2.0);
        assert_eq!(g.p, vec![-1.0]);
    }

    #[test]
    fn gap_vanishes_at_stationary_points() {
        let set = BoxSet::cube(2, -1.0, 1.0).unwrap();
        let g = gap(&QuarticCross, &set, &[0.0, 0.0], 0.0).unwrap();
        assert_eq!(g.omega, 0.0);
        // linear objective minimized at a vertex
        let lin = Quadratic::new(vec![vec![0.0, 0.0], vec![0.0, 0.0]], vec![1.0, -1.0], 0.0).unwrap();
        let g = gap(&lin, &set, &[-1.0, 1.0], 0.0).unwrap();
        assert_eq!(g.omega, 0.0);
    }

    #[test]
    fn gap_refuses_infeasible_points() {
        let set = BoxSet::cube(1, -1.0, 1.0).unwrap();
        assert!(matches!(
            gap(&half_sq(1), &set, &[1.5], 1e-9),
            Err(Error::Infeasible { .. })
        ));
    }

    #[test]
    fn known_l_hand_trace_stops_after_two_gap_evaluations() {
        let set = BoxSet::cube(1, -1.0, 1.0).unwrap();
        let cfg = SolverConfig {
            x0: Some(vec![1.0]),
            l: Some(1.0),
            ..SolverConfig::with_strategy(StrategyKind::KnownL)
        };
        let rep = solve(&half_sq(1), &set, &cfg).unwrap();
        assert_eq!(rep.records.len(), 2);
        assert_eq!(rep.records[0].gap, -2.0);
        assert_eq!(rep.records[0].lambda, Some(0.5));
        assert_eq!(rep.records[1].gap, 0.0);
        assert_eq!(rep.final_x, vec![0.0]);
        assert_eq!(rep.termination, Termination::GapTolReached);
    }

    #[test]
    fn stationary_start_gives_a_single_record() {
        let set = BoxSet::cube(2, -1.0, 1.0).unwrap();
        let cfg = SolverConfig {
            x0: Some(vec![0.0, 0.0]),
            ..SolverConfig::default()
        };
        let rep = solve(&QuarticCross, &set, &cfg).unwrap();
        assert_eq!(rep.records.len(), 1);
        assert_eq!(rep.records[0].lambda, None);
        assert_eq!(rep.termination, Termination::GapTolReached);
    }

    #[test]
    fn diminishing_schedule_is_recorded() {
        let set = ProbabilitySimplex::new(4).unwrap();
        let f = Quadratic::squared_distance(&[0.1, 0.2, 0.3, 0.4]).unwrap();
        let cfg = SolverConfig {
            max_iters: 4,
            gap_tol: 0.0,
            x0: Some(vec![1.0, 0.0, 0.0, 0.0]),
            ..SolverConfig::with_strategy(StrategyKind::Diminishing)
        };
        let rep = solve(&f, &set, &cfg).unwrap();
        let lambdas: Vec<f64> = rep.records.iter().filter_map(|r| r.lambda).collect();
        assert_eq!(lambdas, vec![1.0, 2.0 / 3.0, 0.5, 0.4]);
        assert_eq!(rep.records.len(), 5);
        assert_eq!(rep.termination, Termination::MaxIters);
    }

    #[test]
    fn checker_only_objectives_are_refused() {
        let set = BoxSet::cube(2, -1.0, 1.0).unwrap();
        let f = HomogeneousPower::pnorm(0.5).unwrap();
        assert!(matches!(
            solve(&f, &set, &SolverConfig::default()),
            Err(Error::CheckerOnly(_))
        ));
    }

    #[test]
    fn infeasible_start_is_an_error() {
        let set = ProbabilitySimplex::new(2).unwrap();
        let cfg = SolverConfig {
            x0: Some(vec![1.0, 1.0]),
            ..SolverConfig::default()
        };
        assert!(matches!(
            solve(&half_sq(2), &set, &cfg),
            Err(Error::Infeasible { .. })
        ));
    }

    #[test]
    fn line_search_failure_keeps_partial_trace() {
        let set = BoxSet::cube(1, -1.0, 1.0).unwrap();
        let cfg = SolverConfig {
            x0: Some(vec![1.0]),
            max_backtracks: 0,
            zeta: 0.9,
            ..SolverConfig::default()
        };
        // f = x² from x = 1: the full step reaches f(-1) = 1 which fails the test
        let f = Quadratic::new(vec![vec![2.0]], vec![0.0], 0.0).unwrap();
        let rep = solve(&f, &set, &cfg).unwrap();
        assert_eq!(rep.termination, Termination::LineSearchFailure);
        assert_eq!(rep.records.len(), 1);
        assert!(rep.failure.unwrap().contains("line search"));
    }

    #[test]
    fn gamma_formula() {
        // independent re-derivation for box [-1,1]², L = 2, ζ = 0.1, β = 0.5, ρ = 3
        let diam = 8f64.sqrt();
        let by_hand = (1.0 / (3.0 * diam)).min(1.8 / (0.5 * 2.0 * 8.0));
        assert_eq!(gamma_constant(3.0, diam, 0.1, 0.5, 2.0), by_hand);
        assert!((by_hand - 0.1178511301977579).abs() < 1e-15);
    }

    #[test]
    fn replay_passes_diameter_and_skips_gamma_for_diminishing() {
        let set = ProbabilitySimplex::new(3).unwrap();
        let f = Quadratic::squared_distance(&[1.0, 1.0, 1.0]).unwrap();
        let rep = solve(&f, &set, &SolverConfig::with_strategy(StrategyKind::Diminishing)).unwrap();
        let inputs = replay_bound_inputs(&rep, &f, &set, None).unwrap();
        assert_eq!(inputs.diam, 2f64.sqrt());
        assert_eq!(inputs.gamma, None);
        assert_eq!(inputs.l_source, LipschitzSource::Analytic);
        let rep = solve(&f, &set, &SolverConfig::default()).unwrap();
        let inputs = replay_bound_inputs(&rep, &f, &set, None).unwrap();
        let rho = inputs.rho.unwrap();
        assert_eq!(
            inputs.gamma.unwrap(),
            gamma_constant(rho, 2f64.sqrt(), 0.1, 0.5, 1.0)
        );
    }
}
