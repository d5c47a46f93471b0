use nalgebra::DMatrix;

use super::Objective;
use crate::error::Result;
use crate::geometry::FeasibleSet;

/// `f(t) = |t| (1 − e^{−|t|})` on R¹. Star-convex about 0, concave for |t| > 2.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct AbsExp1D;

impl Objective for AbsExp1D {
    fn name(&self) -> &'static str {
        "absexp"
    }

    fn dim(&self) -> Option<usize> {
        Some(1)
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        self.check_input(x)?;
        let a = x[0].abs();
        Ok(a * -(-a).exp_m1())
    }

    // The one-sided limits agree at 0, where the derivative is 0.
    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_input(x)?;
        let t = x[0];
        if t == 0.0 {
            return Ok(vec![0.0]);
        }
        let a = t.abs();
        Ok(vec![t.signum() * -(-a).exp_m1() + t * (-a).exp()])
    }

    fn hessian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        self.check_input(x)?;
        let a = x[0].abs();
        Ok(DMatrix::from_element(1, 1, (2.0 - a) * (-a).exp()))
    }

    fn minimizer(&self) -> Option<Vec<f64>> {
        Some(vec![0.0])
    }

    // |f''(t)| = |2 − |t|| e^{−|t|} peaks at t = 0.
    fn lipschitz_on(&self, _set: &dyn FeasibleSet) -> Option<f64> {
        Some(2.0)
    }
}

/// `f(s, t) = s²t² + s² + t²`. Star-convex about the origin, Hessian indefinite
/// away from it.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct QuarticCross;

impl Objective for QuarticCross {
    fn name(&self) -> &'static str {
        "quartic_cross"
    }

    fn dim(&self) -> Option<usize> {
        Some(2)
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        self.check_input(x)?;
        let (s, t) = (x[0], x[1]);
        Ok(s * s * t * t + s * s + t * t)
    }

    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_input(x)?;
        let (s, t) = (x[0], x[1]);
        Ok(vec![2.0 * s * t * t + 2.0 * s, 2.0 * s * s * t + 2.0 * t])
    }

    fn hessian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        self.check_input(x)?;
        let (s, t) = (x[0], x[1]);
        let off = 4.0 * s * t;
        Ok(DMatrix::from_row_slice(
            2,
            2,
            &[2.0 * t * t + 2.0, off, off, 2.0 * s * s + 2.0],
        ))
    }

    fn minimizer(&self) -> Option<Vec<f64>> {
        Some(vec![0.0, 0.0])
    }

    /// Row-sum bound on the Hessian norm with `|s|, |t| <= R`: `6R² + 2`.
    fn lipschitz_on(&self, set: &dyn FeasibleSet) -> Option<f64> {
        let r = set.max_abs_coordinate();
        Some(6.0 * r * r + 2.0)
    }
}
