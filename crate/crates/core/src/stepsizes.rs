//! Stepsize rules for the Frank–Wolfe update `x + λ (p − x)`.
//!
//! Four rules are provided: Armijo backtracking with a carried-over trial
//! stepsize, backtracking on a local Lipschitz estimate, the closed form for
//! a known Lipschitz constant, and the parameter-free `2 / (k + 2)`. Every
//! rule returns `λ ∈ (0, 1]` and reports how many objective evaluations it
//! spent. Sufficient-decrease tests compare with a plain `<=`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{axpy, norm_sq};
use crate::objectives::Objective;

pub const DEFAULT_MAX_BACKTRACKS: u32 = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StrategyKind {
    #[serde(rename = "armijo")]
    Armijo,
    #[serde(rename = "adaptive")]
    Adaptive,
    #[serde(rename = "known-l")]
    KnownL,
    #[serde(rename = "diminishing")]
    Diminishing,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 4] = [
        StrategyKind::Armijo,
        StrategyKind::Adaptive,
        StrategyKind::KnownL,
        StrategyKind::Diminishing,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            StrategyKind::Armijo => "armijo",
            StrategyKind::Adaptive => "adaptive",
            StrategyKind::KnownL => "known-l",
            StrategyKind::Diminishing => "diminishing",
        }
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StrategyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        StrategyKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| {
                Error::invalid(
                    "strategy",
                    format!("unknown strategy `{s}` (expected armijo, adaptive, known-l or diminishing)"),
                )
            })
    }
}

/// Inputs shared by all rules at iteration `k`.
#[derive(Debug, Clone, Copy)]
pub struct StepContext<'a> {
    pub x: &'a [f64],
    /// Direction `p(x) − x`.
    pub d: &'a [f64],
    /// Gap `ω(x) < 0`.
    pub gap: f64,
    pub k: usize,
    pub objective: &'a dyn Objective,
    /// Cached `f(x)`.
    pub f_x: f64,
}

impl StepContext<'_> {
    fn abs_gap(&self) -> Result<f64> {
        if !(self.gap < 0.0) {
            return Err(Error::invalid("gap", "stepsize rules require a strictly negative gap"));
        }
        Ok(-self.gap)
    }

    fn d_norm_sq(&self) -> Result<f64> {
        let dd = norm_sq(self.d);
        if dd == 0.0 {
            return Err(Error::invalid("direction", "stepsize rules require a nonzero direction"));
        }
        Ok(dd)
    }

    fn f_at(&self, t: f64) -> Result<f64> {
        self.objective.value(&axpy(self.x, t, self.d))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub lambda: f64,
    pub f_evals: u32,
    /// `f(x + λ d)` when the rule already evaluated it.
    pub f_next: Option<f64>,
    /// Number of rejected trials (`ℓ_k` or `j_k`).
    pub rejections: u32,
    /// Armijo only: the grown trial stepsize was capped at 1.
    pub trial_clamped: bool,
}

impl StepOutcome {
    fn closed_form(lambda: f64) -> Self {
        Self {
            lambda,
            f_evals: 0,
            f_next: None,
            rejections: 0,
            trial_clamped: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmijoState {
    pub beta: f64,
    pub zeta: f64,
    /// Trial stepsize for the next call, always in (0, 1].
    pub trial: f64,
    pub max_backtracks: u32,
}

impl ArmijoState {
    pub fn new(beta: f64, zeta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::invalid("beta", "must lie in (0, 1)"));
        }
        if !(zeta > 0.0 && zeta < 1.0) {
            return Err(Error::invalid("zeta", "must lie in (0, 1)"));
        }
        Ok(Self {
            beta,
            zeta,
            trial: 1.0,
            max_backtracks: DEFAULT_MAX_BACKTRACKS,
        })
    }
}

/// One Armijo step: the smallest `ℓ >= 0` with
/// `f(x + β^ℓ λ̄ d) <= f(x) − ζ β^ℓ λ̄ |ω|`, then `λ̄ ← min(1, β^{ℓ−1} λ̄)`.
pub fn armijo_step(ctx: &StepContext<'_>, state: &ArmijoState) -> Result<(StepOutcome, ArmijoState)> {
    let abs_gap = ctx.abs_gap()?;
    if !(state.trial > 0.0 && state.trial <= 1.0) {
        return Err(Error::invalid("trial", "trial stepsize must lie in (0, 1]"));
    }
    let mut last = state.trial;
    for ell in 0..=state.max_backtracks {
        let t = state.beta.powi(ell as i32) * state.trial;
        last = t;
        let f_t = ctx.f_at(t)?;
        if f_t <= ctx.f_x - state.zeta * t * abs_gap {
            let grown = state.beta.powi(ell as i32 - 1) * state.trial;
            let next = ArmijoState {
                trial: grown.min(1.0),
                ..*state
            };
            let outcome = StepOutcome {
                lambda: t,
                f_evals: ell + 1,
                f_next: Some(f_t),
                rejections: ell,
                trial_clamped: grown > 1.0,
            };
            return Ok((outcome, next));
        }
    }
    Err(Error::LineSearchFailure {
        tries: state.max_backtracks,
        last_lambda: last,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveLipschitzState {
    /// Current estimate `L_k`.
    pub l_current: f64,
    pub l0: f64,
    pub max_doublings: u32,
}

impl AdaptiveLipschitzState {
    pub fn new(l0: f64) -> Result<Self> {
        if !(l0.is_finite() && l0 > 0.0) {
            return Err(Error::invalid("l0", "must be a positive finite number"));
        }
        Ok(Self {
            l_current: l0,
            l0,
            max_doublings: DEFAULT_MAX_BACKTRACKS,
        })
    }
}

/// One step of the Lipschitz-estimating rule.
///
/// For `j = 0, 1, ...` with `M_j = 2^j L_k` the candidate is
/// `λ_j = min{1, |ω| / (M_j ‖d‖²)}`, accepted at the first `j` where
/// `M_j >= 2 L0` and `f(x + λ_j d) <= f(x) − |ω| λ_j + (M_j / 2) ‖d‖² λ_j²`.
/// The estimate then becomes `L_{k+1} = 2^{j−1} L_k`, which keeps it inside
/// `[L0, L + L0]`. Each tested `j` costs one evaluation.
pub fn adaptive_lipschitz_step(
    ctx: &StepContext<'_>,
    state: &AdaptiveLipschitzState,
) -> Result<(StepOutcome, AdaptiveLipschitzState)> {
    let abs_gap = ctx.abs_gap()?;
    let dd = ctx.d_norm_sq()?;
    let mut last = 1.0;
    for j in 0..=state.max_doublings {
        let m = state.l_current * 2f64.powi(j as i32);
        let lambda = (abs_gap / (m * dd)).min(1.0);
        last = lambda;
        let f_t = ctx.f_at(lambda)?;
        let model = ctx.f_x - abs_gap * lambda + 0.5 * m * dd * lambda * lambda;
        if f_t <= model && m >= 2.0 * state.l0 {
            let next = AdaptiveLipschitzState {
                l_current: state.l_current * 2f64.powi(j as i32 - 1),
                ..*state
            };
            let outcome = StepOutcome {
                lambda,
                f_evals: j + 1,
                f_next: Some(f_t),
                rejections: j,
                trial_clamped: false,
            };
            return Ok((outcome, next));
        }
    }
    Err(Error::EstimationFailure {
        tries: state.max_doublings,
        last_lambda: last,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KnownLipschitzRule {
    pub l: f64,
}

impl KnownLipschitzRule {
    pub fn new(l: f64) -> Result<Self> {
        if !(l.is_finite() && l > 0.0) {
            return Err(Error::invalid("l", "must be a positive finite number"));
        }
        Ok(Self { l })
    }
}

/// `λ = min{1, |ω| / (L ‖d‖²)}`, the minimizer of the quadratic upper model on (0, 1].
pub fn known_lipschitz_step(ctx: &StepContext<'_>, rule: &KnownLipschitzRule) -> Result<StepOutcome> {
    let abs_gap = ctx.abs_gap()?;
    let dd = ctx.d_norm_sq()?;
    Ok(StepOutcome::closed_form((abs_gap / (rule.l * dd)).min(1.0)))
}

/// `2 / (k + 2)`.
pub fn diminishing_step(k: usize) -> f64 {
    2.0 / (k as f64 + 2.0)
}

/// A stepsize rule together with its per-run state.
#[derive(Debug, Clone, PartialEq)]
pub enum Stepsize {
    Armijo(ArmijoState),
    Adaptive(AdaptiveLipschitzState),
    KnownL(KnownLipschitzRule),
    Diminishing,
}

impl Stepsize {
    pub fn kind(&self) -> StrategyKind {
        match self {
            Stepsize::Armijo(_) => StrategyKind::Armijo,
            Stepsize::Adaptive(_) => StrategyKind::Adaptive,
            Stepsize::KnownL(_) => StrategyKind::KnownL,
            Stepsize::Diminishing => StrategyKind::Diminishing,
        }
    }

    /// Lipschitz value the rule will use at the next step, if it has one.
    pub fn l_estimate(&self) -> Option<f64> {
        match self {
            Stepsize::Adaptive(s) => Some(s.l_current),
            Stepsize::KnownL(r) => Some(r.l),
            _ => None,
        }
    }

    pub fn step(&mut self, ctx: &StepContext<'_>) -> Result<StepOutcome> {
        match self {
            Stepsize::Armijo(state) => {
                let (out, next) = armijo_step(ctx, state)?;
                *state = next;
                Ok(out)
            }
            Stepsize::Adaptive(state) => {
                let (out, next) = adaptive_lipschitz_step(ctx, state)?;
                *state = next;
                Ok(out)
            }
            Stepsize::KnownL(rule) => known_lipschitz_step(ctx, rule),
            Stepsize::Diminishing => {
                ctx.abs_gap()?;
                Ok(StepOutcome::closed_form(diminishing_step(ctx.k)))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::Quadratic;

    /// f(x) = x² written as ½ x (2) x.
    fn square() -> Quadratic {
        Quadratic::new(vec![vec![2.0]], vec![0.0], 0.0).unwrap()
    }

    fn ctx_at_one(f: &Quadratic) -> StepContext<'_> {
        // x = 1 on [-1, 1]: p = -1, d = -2, ω = f'(1)·d = -4
        StepContext {
            x: &[1.0],
            d: &[-2.0],
            gap: -4.0,
            k: 0,
            objective: f,
            f_x: 1.0,
        }
    }

    /// Independent scan: first ℓ passing the Armijo test, evaluated from scratch.
    fn armijo_oracle(zeta: f64, beta: f64, trial: f64) -> (usize, f64) {
        let f = |x: f64| x * x;
        for ell in 0..100 {
            let t = trial * beta.powi(ell);
            if f(1.0 - 2.0 * t) <= 1.0 - zeta * t * 4.0 {
                return (ell as usize, t);
            }
        }
        unreachable!()
    }

    #[test]
    fn armijo_hand_trace() {
        let f = square();
        let ctx = ctx_at_one(&f);
        let state = ArmijoState::new(0.5, 0.1).unwrap();
        let (out, next) = armijo_step(&ctx, &state).unwrap();
        let (ell, t) = armijo_oracle(0.1, 0.5, 1.0);
        assert_eq!((ell, t), (1, 0.5));
        assert_eq!(out.lambda, 0.5);
        assert_eq!(out.rejections, 1);
        assert_eq!(out.f_evals, 2);
        assert_eq!(out.f_next, Some(0.0));
        assert_eq!(next.trial, 1.0);
        assert!(!out.trial_clamped);
    }

    #[test]
    fn armijo_immediate_acceptance_grows_trial() {
        let f = square();
        let ctx = ctx_at_one(&f);
        let mut state = ArmijoState::new(0.5, 0.1).unwrap();
        state.trial = 0.25;
        let (out, next) = armijo_step(&ctx, &state).unwrap();
        assert_eq!(out.lambda, 0.25);
        assert_eq!(out.f_evals, 1);
        assert_eq!(next.trial, 0.5);
        state.trial = 0.75;
        let (out, next) = armijo_step(&ctx, &state).unwrap();
        assert_eq!(out.lambda, 0.75);
        assert_eq!(next.trial, 1.0);
        assert!(out.trial_clamped);
    }

    #[test]
    fn armijo_fails_on_a_lying_gap() {
        // claimed gap far larger than the real decrease: never accepted
        let f = square();
        let ctx = StepContext {
            gap: -1e300,
            ..ctx_at_one(&f)
        };
        let state = ArmijoState::new(0.5, 0.1).unwrap();
        match armijo_step(&ctx, &state) {
            Err(Error::LineSearchFailure { tries, last_lambda }) => {
                assert_eq!(tries, 60);
                assert_eq!(last_lambda, 0.5f64.powi(60));
            }
            other => panic!("expected failure, got {other:?}"),
        }
    }

    /// Independent j-scan for the Lipschitz-estimating rule.
    fn adaptive_oracle(l_k: f64, l0: f64) -> (usize, f64, f64) {
        let f = |x: f64| x * x;
        for j in 0..100 {
            let m = l_k * 2f64.powi(j);
            let lam = (4.0 / (m * 4.0)).min(1.0);
            let rhs = 1.0 - 4.0 * lam + m / 2.0 * 4.0 * lam * lam;
            if f(1.0 - 2.0 * lam) <= rhs && m >= 2.0 * l0 {
                return (j as usize, lam, l_k * 2f64.powi(j - 1));
            }
        }
        unreachable!()
    }

    #[test]
    fn adaptive_hand_trace() {
        let f = square();
        let ctx = ctx_at_one(&f);
        let state = AdaptiveLipschitzState::new(1.0).unwrap();
        let (out, next) = adaptive_lipschitz_step(&ctx, &state).unwrap();
        assert_eq!(adaptive_oracle(1.0, 1.0), (1, 0.5, 1.0));
        assert_eq!(out.lambda, 0.5);
        assert_eq!(out.rejections, 1);
        assert_eq!(out.f_evals, 2);
        assert_eq!(next.l_current, 1.0);
    }

    #[test]
    fn adaptive_halves_a_generous_estimate() {
        let f = square();
        let ctx = ctx_at_one(&f);
        let mut state = AdaptiveLipschitzState::new(1.0).unwrap();
        state.l_current = 8.0;
        let (out, next) = adaptive_lipschitz_step(&ctx, &state).unwrap();
        assert_eq!(adaptive_oracle(8.0, 1.0), (0, 0.125, 4.0));
        assert_eq!(out.lambda, 0.125);
        assert_eq!(out.f_evals, 1);
        assert_eq!(next.l_current, 4.0);
    }

    #[test]
    fn known_lipschitz_closed_form() {
        let f = square();
        // |ω| = 2, L = 1, ‖d‖² = 4 → 0.5
        let ctx = StepContext {
            gap: -2.0,
            ..ctx_at_one(&f)
        };
        let rule = KnownLipschitzRule::new(1.0).unwrap();
        assert_eq!(known_lipschitz_step(&ctx, &rule).unwrap().lambda, 0.5);
        // grid minimization of the model -2λ + ½·1·4·λ² on (0, 1]
        let n = 100_000;
        let best = (1..=n)
            .map(|i| i as f64 / n as f64)
            .min_by(|a, b| {
                let m = |l: f64| -2.0 * l + 2.0 * l * l;
                m(*a).total_cmp(&m(*b))
            })
            .unwrap();
        assert!((best - 0.5).abs() <= 1.0 / n as f64);
        // |ω| = 4 sits on the clamp boundary
        let ctx = ctx_at_one(&f);
        let out = known_lipschitz_step(&ctx, &rule).unwrap();
        assert_eq!(out.lambda, 1.0);
        assert_eq!(out.f_evals, 0);
    }

    #[test]
    fn diminishing_values() {
        assert_eq!(diminishing_step(0), 1.0);
        assert_eq!(diminishing_step(2), 0.5);
        assert_eq!(diminishing_step(198), 0.01);
    }

    #[test]
    fn rules_refuse_stationary_contexts() {
        let f = square();
        let ctx = StepContext {
            gap: 0.0,
            ..ctx_at_one(&f)
        };
        assert!(armijo_step(&ctx, &ArmijoState::new(0.5, 0.1).unwrap()).is_err());
        assert!(Stepsize::Diminishing.step(&ctx).is_err());
        let ctx = StepContext {
            d: &[0.0],
            ..ctx_at_one(&f)
        };
        assert!(known_lipschitz_step(&ctx, &KnownLipschitzRule::new(1.0).unwrap()).is_err());
    }

    #[test]
    fn strategy_names_round_trip() {
        for k in StrategyKind::ALL {
            assert_eq!(k.as_str().parse::<StrategyKind>().unwrap(), k);
            assert_eq!(serde_json::to_string(&k).unwrap(), format!("\"{k}\""));
        }
        assert!("exact".parse::<StrategyKind>().is_err());
    }

    #[test]
    fn parameters_validated() {
        assert!(ArmijoState::new(1.0, 0.1).is_err());
        assert!(ArmijoState::new(0.5, 0.0).is_err());
        assert!(AdaptiveLipschitzState::new(0.0).is_err());
        assert!(KnownLipschitzRule::new(f64::INFINITY).is_err());
    }
}
