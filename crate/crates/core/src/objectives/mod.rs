//! Differentiable objectives: a convex quadratic baseline and the
//! star-convex but nonconvex examples (|t|(1 - e^-|t|), s²t² + s² + t²,
//! homogeneous powers and weighted squared distances to star-shaped unions).

mod homogeneous;
mod nonconvex;
mod quadratic;
mod spec;
mod star_distance;

pub use homogeneous::{HomogeneousPower, PowerKind};
pub use nonconvex::{AbsExp1D, QuarticCross};
pub use quadratic::Quadratic;
pub use spec::{MemberSpec, ObjectiveSpec, PieceSpec};
pub use star_distance::{distance_squared, Piece, Shape, StarShapedDistanceSum};

use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::geometry::FeasibleSet;
use crate::linalg::{check_dim, check_finite};

/// A continuously differentiable function on R^n.
pub trait Objective: fmt::Debug + Send + Sync {
    fn name(&self) -> &'static str;

    /// Fixed input dimension, or `None` for objectives defined in any dimension.
    fn dim(&self) -> Option<usize>;

    fn value(&self, x: &[f64]) -> Result<f64>;

    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>>;

    fn hessian(&self, _x: &[f64]) -> Result<DMatrix<f64>> {
        Err(Error::Unsupported(format!("{} has no Hessian", self.name())))
    }

    /// A known global minimizer over all of R^n, if one is declared.
    fn minimizer(&self) -> Option<Vec<f64>> {
        None
    }

    /// A trusted gradient-Lipschitz constant valid on `set`, when one is
    /// available analytically.
    fn lipschitz_on(&self, _set: &dyn FeasibleSet) -> Option<f64> {
        None
    }

    /// Objectives whose gradient is singular at the minimizer may be
    /// inspected by the checkers but are refused by the solver.
    fn checker_only(&self) -> bool {
        false
    }

    /// Degree `d` with `f(t x) = t^d f(x)` for `t > 0`, if positively homogeneous.
    fn homogeneity_degree(&self) -> Option<f64> {
        None
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if let Some(n) = self.dim() {
            check_dim(n, x.len())?;
        }
        check_finite(x, "objective argument")
    }
}
