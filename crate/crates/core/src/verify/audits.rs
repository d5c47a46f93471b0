//! Bound audits over recorded traces. Each audit is a pure function of the
//! report and the constants: it lists, per iteration, the observed quantity
//! and the interval it must fall in, and fails at the first iteration where
//! the observation leaves the interval by more than a relative `tol_rel`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solver::{BoundInputs, RunReport};
use crate::stepsizes::StrategyKind;

pub const AUDIT_TOL_REL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub k: usize,
    pub observed: f64,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

impl BoundCheck {
    fn upper(k: usize, observed: f64, bound: f64) -> Self {
        Self {
            k,
            observed,
            lower: None,
            upper: Some(bound),
        }
    }

    fn lower(k: usize, observed: f64, bound: f64) -> Self {
        Self {
            k,
            observed,
            lower: Some(bound),
            upper: None,
        }
    }

    pub fn holds(&self, tol_rel: f64) -> bool {
        let above = self
            .upper
            .is_some_and(|u| self.observed > u + tol_rel * u.abs());
        let below = self
            .lower
            .is_some_and(|l| self.observed < l - tol_rel * l.abs());
        !(above || below) && !self.observed.is_nan()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundAuditReport {
    pub name: String,
    pub checks: Vec<BoundCheck>,
    pub first_violation_k: Option<usize>,
    pub passed: bool,
    pub tol_rel: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl BoundAuditReport {
    fn new(name: &str, checks: Vec<BoundCheck>, tol_rel: f64) -> Self {
        let first_violation_k = checks.iter().find(|c| !c.holds(tol_rel)).map(|c| c.k);
        Self {
            name: name.to_string(),
            passed: first_violation_k.is_none(),
            first_violation_k,
            checks,
            tol_rel,
            note: None,
        }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// `k,observed,lower,upper,holds` rows.
    pub fn details_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.16e}")).unwrap_or_default();
        let mut out = String::from("k,observed,lower,upper,holds\n");
        for c in &self.checks {
            out.push_str(&format!(
                "{},{:.16e},{},{},{}\n",
                c.k,
                c.observed,
                opt(c.lower),
                opt(c.upper),
                c.holds(self.tol_rel)
            ));
        }
        out
    }
}

fn require_strategy(report: &RunReport, audit: &str, allowed: &[StrategyKind]) -> Result<()> {
    if allowed.contains(&report.strategy()) {
        Ok(())
    } else {
        Err(Error::StrategyMismatch {
            audit: audit.to_string(),
            strategy: report.strategy().to_string(),
        })
    }
}

fn require_f_star(f_star: Option<f64>) -> Result<f64> {
    f_star.ok_or_else(|| Error::MissingConstant("optimal value f* is unknown".into()))
}

/// `f(x^k) − f* <= 1 / (ζγk)` for `k >= 1` and `λ_k >= γ|ω(x^k)|` for every step.
pub fn audit_armijo_rate(
    report: &RunReport,
    inputs: &BoundInputs,
    f_star: Option<f64>,
) -> Result<Vec<BoundAuditReport>> {
    require_strategy(report, "armijo_rate", &[StrategyKind::Armijo])?;
    let f_star = require_f_star(f_star)?;
    let gamma = inputs
        .gamma
        .ok_or_else(|| Error::MissingConstant("gamma".into()))?;
    let big_gamma = inputs.zeta * gamma;
    let rate = report
        .records
        .iter()
        .filter(|r| r.k >= 1)
        .map(|r| BoundCheck::upper(r.k, r.f - f_star, 1.0 / (big_gamma * r.k as f64)))
        .collect();
    let steps = report
        .records
        .iter()
        .filter_map(|r| r.lambda.map(|lam| BoundCheck::lower(r.k, lam, gamma * r.gap.abs())))
        .collect();
    Ok(vec![
        BoundAuditReport::new("armijo_rate", rate, AUDIT_TOL_REL),
        BoundAuditReport::new("armijo_stepsize", steps, AUDIT_TOL_REL),
    ])
}

/// `f(x^{k+1}) <= f(x^k) − ζ λ_k |ω(x^k)|` along the trace.
pub fn audit_armijo_descent(report: &RunReport) -> Result<BoundAuditReport> {
    require_strategy(report, "armijo_descent", &[StrategyKind::Armijo])?;
    let zeta = report.config.zeta;
    let checks = report
        .records
        .windows(2)
        .filter_map(|w| {
            let lam = w[0].lambda?;
            Some(BoundCheck::upper(w[0].k, w[1].f, w[0].f - zeta * lam * w[0].gap.abs()))
        })
        .collect();
    Ok(BoundAuditReport::new("armijo_descent", checks, AUDIT_TOL_REL))
}

/// (i) `f(x^k) − f* <= 4(L+L0)diam²/k` for `k >= 1`;
/// (ii) `min_{⌊k/2⌋+2 <= ℓ <= k} |ω_ℓ| <= 16(L+L0)diam²/(k−2)` for `k >= 3`.
pub fn audit_fcr_rates(
    report: &RunReport,
    inputs: &BoundInputs,
    f_star: Option<f64>,
) -> Result<Vec<BoundAuditReport>> {
    require_strategy(
        report,
        "fcr_rates",
        &[StrategyKind::Adaptive, StrategyKind::KnownL, StrategyKind::Diminishing],
    )?;
    let f_star = require_f_star(f_star)?;
    let c = (inputs.l + inputs.l0) * inputs.diam * inputs.diam;
    let recs = &report.records;
    let value = recs
        .iter()
        .filter(|r| r.k >= 1)
        .map(|r| BoundCheck::upper(r.k, r.f - f_star, 4.0 * c / r.k as f64))
        .collect();
    let mut gap = Vec::new();
    for k in 3..recs.len() {
        let best = recs[k / 2 + 2..=k]
            .iter()
            .map(|r| r.gap.abs())
            .fold(f64::INFINITY, f64::min);
        gap.push(BoundCheck::upper(k, best, 16.0 * c / (k as f64 - 2.0)));
    }
    let mut out = vec![
        BoundAuditReport::new("fcr_value", value, AUDIT_TOL_REL),
        BoundAuditReport::new("fcr_gap", gap, AUDIT_TOL_REL),
    ];
    if report.strategy() == StrategyKind::Diminishing {
        let note = format!(
            "the bound constant includes L0 = {} from the configuration although the diminishing rule never uses it",
            inputs.l0
        );
        out = out.into_iter().map(|a| a.with_note(note.clone())).collect();
    }
    Ok(out)
}

/// Every recorded estimate satisfies `L0 <= L_k <= L + L0`.
pub fn audit_lipschitz_corridor(report: &RunReport, l_true: f64, l0: f64) -> Result<BoundAuditReport> {
    require_strategy(report, "lipschitz_corridor", &[StrategyKind::Adaptive])?;
    let checks = report
        .records
        .iter()
        .filter_map(|r| {
            r.l_est.map(|l| BoundCheck {
                k: r.k,
                observed: l,
                lower: Some(l0),
                upper: Some(l_true + l0),
            })
        })
        .collect();
    Ok(BoundAuditReport::new("lipschitz_corridor", checks, AUDIT_TOL_REL))
}

/// `f(x^{k+1}) <= f(x^k) − ½|ω_k|λ_k` and `λ_k >= min{1, |ω_k| / (2(L+L0)diam²)}`.
pub fn audit_adaptive_descent(report: &RunReport, inputs: &BoundInputs) -> Result<Vec<BoundAuditReport>> {
    require_strategy(report, "adaptive_descent", &[StrategyKind::Adaptive])?;
    let alpha = 2.0 * (inputs.l + inputs.l0) * inputs.diam * inputs.diam;
    let descent = report
        .records
        .windows(2)
        .filter_map(|w| {
            let lam = w[0].lambda?;
            Some(BoundCheck::upper(w[0].k, w[1].f, w[0].f - 0.5 * w[0].gap.abs() * lam))
        })
        .collect();
    let steps = report
        .records
        .iter()
        .filter_map(|r| {
            r.lambda
                .map(|lam| BoundCheck::lower(r.k, lam, (r.gap.abs() / alpha).min(1.0)))
        })
        .collect();
    Ok(vec![
        BoundAuditReport::new("adaptive_descent", descent, AUDIT_TOL_REL),
        BoundAuditReport::new("adaptive_stepsize", steps, AUDIT_TOL_REL),
    ])
}

/// Every audit that applies to the report's strategy. Rate audits are
/// skipped when `f_star` is unknown.
pub fn audit_all(
    report: &RunReport,
    inputs: &BoundInputs,
    f_star: Option<f64>,
) -> Result<Vec<BoundAuditReport>> {
    let mut out = Vec::new();
    match report.strategy() {
        StrategyKind::Armijo => {
            if f_star.is_some() {
                out.extend(audit_armijo_rate(report, inputs, f_star)?);
            }
            out.push(audit_armijo_descent(report)?);
        }
        StrategyKind::Adaptive => {
            if f_star.is_some() {
                out.extend(audit_fcr_rates(report, inputs, f_star)?);
            }
            out.push(audit_lipschitz_corridor(report, inputs.l, inputs.l0)?);
            out.extend(audit_adaptive_descent(report, inputs)?);
        }
        StrategyKind::KnownL | StrategyKind::Diminishing => {
            if f_star.is_some() {
                out.extend(audit_fcr_rates(report, inputs, f_star)?);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{IterationRecord, LipschitzSource, SolverConfig, Termination};

    fn record(k: usize, f: f64, gap: f64, lambda: Option<f64>, l_est: Option<f64>) -> IterationRecord {
        IterationRecord {
            k,
            f,
            gap,
            lambda,
            l_est,
            fevals_iter: 0,
            fevals_cum: 0,
        }
    }

    fn report(strategy: StrategyKind, records: Vec<IterationRecord>) -> RunReport {
        RunReport {
            config: SolverConfig::with_strategy(strategy),
            termination: Termination::MaxIters,
            failure: None,
            final_x: vec![0.0],
            wall_time_ms: 0.0,
            l_used: None,
            trial_clamps: 0,
            records,
        }
    }

    fn inputs(gamma: Option<f64>) -> BoundInputs {
        BoundInputs {
            diam: 8f64.sqrt(),
            l: 1.0,
            l_source: LipschitzSource::Analytic,
            l0: 1.0,
            zeta: 0.1,
            beta: 0.5,
            rho: None,
            gamma,
        }
    }

    #[test]
    fn fabricated_armijo_violation_is_caught_at_k1() {
        let gamma = 0.5;
        // 1/Γ = 1/(0.1 · 0.5) = 20
        let rep = report(
            StrategyKind::Armijo,
            vec![
                record(0, 30.0, -1.0, Some(1.0), None),
                record(1, 21.0, -1.0, Some(1.0), None),
                record(2, 1.0, -1.0, None, None),
            ],
        );
        let audits = audit_armijo_rate(&rep, &inputs(Some(gamma)), Some(0.0)).unwrap();
        assert!(!audits[0].passed);
        assert_eq!(audits[0].first_violation_k, Some(1));
        assert!(audits[1].passed);
    }

    #[test]
    fn fcr_value_bound_at_k10() {
        // 4 · (1 + 1) · 8 / 10 = 6.4
        let recs: Vec<_> = (0..=10).map(|k| record(k, 6.4, -0.0, Some(0.5), None)).collect();
        let rep = report(StrategyKind::KnownL, recs.clone());
        let audits = audit_fcr_rates(&rep, &inputs(None), Some(0.0)).unwrap();
        let at10 = audits[0].checks.iter().find(|c| c.k == 10).unwrap();
        assert!((at10.upper.unwrap() - 6.4).abs() < 1e-12);
        assert!(audits[0].passed);
        let mut recs = recs;
        recs[10].f = 6.5;
        let rep = report(StrategyKind::KnownL, recs);
        let audits = audit_fcr_rates(&rep, &inputs(None), Some(0.0)).unwrap();
        assert_eq!(audits[0].first_violation_k, Some(10));
    }

    #[test]
    fn fcr_gap_window_and_negative_control() {
        // the window for k = 3 is {3}: only record 3's gap matters
        let mut recs: Vec<_> = (0..=3).map(|k| record(k, 0.0, -1000.0, Some(0.5), None)).collect();
        recs[3].gap = -1.0;
        let rep = report(StrategyKind::Diminishing, recs.clone());
        let audits = audit_fcr_rates(&rep, &inputs(None), Some(0.0)).unwrap();
        assert_eq!(audits[1].checks.len(), 1);
        assert_eq!(audits[1].checks[0].observed, 1.0);
        assert!(audits[1].passed);
        assert!(audits[1].note.as_deref().unwrap().contains("L0"));
        recs[3].gap = -1000.0;
        let rep = report(StrategyKind::Diminishing, recs);
        let audits = audit_fcr_rates(&rep, &inputs(None), Some(0.0)).unwrap();
        assert!(!audits[1].passed);
        assert_eq!(audits[1].first_violation_k, Some(3));
    }

    #[test]
    fn corridor_negative_control() {
        let rep = report(
            StrategyKind::Adaptive,
            vec![
                record(0, 1.0, -1.0, Some(0.1), Some(1.0)),
                record(1, 0.9, -1.0, Some(0.1), Some(10.0)),
            ],
        );
        let a = audit_lipschitz_corridor(&rep, 3.0, 1.0).unwrap();
        assert!(!a.passed);
        assert_eq!(a.first_violation_k, Some(1));
        assert_eq!(a.checks[0].observed, 1.0);
    }

    #[test]
    fn strategy_mismatch_and_missing_constants() {
        let rep = report(StrategyKind::Diminishing, vec![record(0, 0.0, 0.0, None, None)]);
        assert!(matches!(
            audit_armijo_rate(&rep, &inputs(Some(1.0)), Some(0.0)),
            Err(Error::StrategyMismatch { .. })
        ));
        assert!(matches!(
            audit_fcr_rates(&rep, &inputs(None), None),
            Err(Error::MissingConstant(_))
        ));
        assert!(audit_lipschitz_corridor(&rep, 1.0, 1.0).is_err());
    }

    #[test]
    fn audits_are_pure() {
        let rep = report(
            StrategyKind::Adaptive,
            vec![
                record(0, 1.0, -1.0, Some(0.5), Some(1.0)),
                record(1, 0.5, -0.5, Some(0.5), Some(1.0)),
                record(2, 0.2, -0.1, None, Some(1.0)),
            ],
        );
        let a = audit_all(&rep, &inputs(None), Some(0.0)).unwrap();
        let b = audit_all(&rep, &inputs(None), Some(0.0)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 5);
    }

    #[test]
    fn details_csv_has_one_row_per_check() {
        let rep = report(StrategyKind::Armijo, vec![record(0, 1.0, -1.0, Some(1.0), None), record(1, 0.5, 0.0, None, None)]);
        let a = audit_armijo_descent(&rep).unwrap();
        let csv = a.details_csv();
        assert_eq!(csv.lines().count(), 2);
        assert!(csv.starts_with("k,observed,lower,upper,holds\n"));
    }
}
