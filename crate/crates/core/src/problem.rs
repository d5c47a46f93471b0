//! A problem is an objective paired with a feasible set, plus an optional
//! declared minimizer or optimal value.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{FeasibleSet, SetSpec};
use crate::linalg::check_dim;
use crate::objectives::{Objective, ObjectiveSpec};
use crate::solver::SolverConfig;

/// Tolerance used to accept an analytic minimizer as a point of the set.
const MINIMIZER_FEASIBILITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub objective: ObjectiveSpec,
    pub set: SetSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_star: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f_star: Option<f64>,
    /// Starting point used when the solver configuration does not set one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
}

impl ProblemSpec {
    /// `config` with this problem's starting point filled in if it has none.
    pub fn configure(&self, config: &SolverConfig) -> SolverConfig {
        SolverConfig {
            x0: config.x0.clone().or_else(|| self.x0.clone()),
            ..config.clone()
        }
    }

    pub fn build(&self) -> Result<Problem> {
        Problem::new(
            self.objective.build()?,
            self.set.build()?,
            self.x_star.clone(),
            self.f_star,
        )
    }
}

#[derive(Debug)]
pub struct Problem {
    pub objective: Box<dyn Objective>,
    pub set: Box<dyn FeasibleSet>,
    pub x_star: Option<Vec<f64>>,
    pub f_star: Option<f64>,
}

impl Problem {
    pub fn new(
        objective: Box<dyn Objective>,
        set: Box<dyn FeasibleSet>,
        x_star: Option<Vec<f64>>,
        f_star: Option<f64>,
    ) -> Result<Self> {
        if let Some(n) = objective.dim() {
            check_dim(n, set.dim())?;
        }
        if let Some(x) = &x_star {
            check_dim(set.dim(), x.len())?;
        }
        if let Some(f) = f_star {
            if !f.is_finite() {
                return Err(Error::invalid("f_star", "must be finite"));
            }
        }
        Ok(Self {
            objective,
            set,
            x_star,
            f_star,
        })
    }

    /// The declared minimizer, or the objective's analytic one when it lies in the set.
    pub fn minimizer(&self) -> Option<Vec<f64>> {
        if let Some(x) = &self.x_star {
            return Some(x.clone());
        }
        let x = self.objective.minimizer()?;
        (x.len() == self.set.dim()
            && self.set.violation(&x) <= MINIMIZER_FEASIBILITY_TOL)
            .then_some(x)
    }

    /// The declared optimal value, or `f` at [`Problem::minimizer`].
    pub fn optimal_value(&self) -> Option<f64> {
        if self.f_star.is_some() {
            return self.f_star;
        }
        let x = self.minimizer()?;
        self.objective.value(&x).ok().filter(|f| f.is_finite())
    }
}
