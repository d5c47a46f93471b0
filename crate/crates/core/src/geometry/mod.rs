//! Compact convex feasible sets.
//!
//! Every set answers four questions: where a linear function is minimized
//! over it (the linear minimization oracle), how wide it is, whether a point
//! belongs to it, and how to draw a random member. Ties in the oracle are
//! broken toward the lowest index so that traces are reproducible.

mod balls;
mod boxset;
mod polytope;
mod simplex;
mod spec;

pub use balls::{L1Ball, L2Ball};
pub use boxset::BoxSet;
pub use polytope::{min_norm_point, VertexPolytope};
pub use simplex::ProbabilitySimplex;
pub use spec::SetSpec;

use std::fmt;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::linalg::{check_dim, check_finite};

/// A compact convex subset of R^n with a linear minimization oracle.
pub trait FeasibleSet: fmt::Debug + Send + Sync {
    fn dim(&self) -> usize;

    /// Short lowercase name used in reports (`"simplex"`, `"box"`, ...).
    fn kind(&self) -> &'static str;

    /// Minimizer of `g^T u` over the set. `g` has already been validated.
    fn minimize_linear(&self, g: &[f64]) -> Vec<f64>;

    /// Largest Euclidean distance between two points of the set.
    fn diameter(&self) -> f64;

    /// Nonnegative constraint residual of `x`; zero exactly on the set.
    ///
    /// Simplex and box report the largest violated constraint, balls the
    /// excess norm, polytopes the Euclidean distance to the hull.
    fn violation(&self, x: &[f64]) -> f64;

    /// Upper bound on `|x_i|` over all members, used for analytic
    /// Lipschitz bounds of polynomial objectives.
    fn max_abs_coordinate(&self) -> f64;

    fn sample_with(&self, rng: &mut dyn RngCore) -> Vec<f64>;

    /// Linear minimization oracle with input validation.
    fn lmo(&self, g: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), g.len())?;
        check_finite(g, "lmo gradient")?;
        Ok(self.minimize_linear(g))
    }

    fn contains(&self, x: &[f64], tol: f64) -> Result<bool> {
        check_dim(self.dim(), x.len())?;
        Ok(self.violation(x) <= tol)
    }

    /// Deterministic random member of the set for a given seed.
    fn sample(&self, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.sample_with(&mut rng)
    }
}

/// Index of the smallest entry; the first one wins on ties.
pub(crate) fn argmin_first(values: impl IntoIterator<Item = f64>) -> usize {
    let mut best = 0;
    let mut best_val = f64::INFINITY;
    for (i, v) in values.into_iter().enumerate() {
        if v < best_val {
            best = i;
            best_val = v;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{dist, dot};
    use rand::Rng;

    fn all_sets() -> Vec<Box<dyn FeasibleSet>> {
        vec![
            Box::new(ProbabilitySimplex::new(5).unwrap()),
            Box::new(BoxSet::new(vec![-1.0, 0.0, 2.0], vec![1.0, 0.5, 3.0]).unwrap()),
            Box::new(L1Ball::new(2.0, vec![0.5, -0.5, 1.0]).unwrap()),
            Box::new(L2Ball::new(1.5, vec![0.0, 1.0, 0.0, -1.0]).unwrap()),
            Box::new(
                VertexPolytope::new(vec![
                    vec![0.0, 0.0],
                    vec![1.0, 0.2],
                    vec![0.3, 1.0],
                    vec![-0.5, 0.7],
                ])
                .unwrap(),
            ),
        ]
    }

    #[test]
    fn lmo_beats_sampled_points_for_every_set() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for set in all_sets() {
            let us: Vec<Vec<f64>> = (0..200).map(|_| set.sample_with(&mut rng)).collect();
            for _ in 0..200 {
                let g: Vec<f64> = (0..set.dim()).map(|_| rng.random_range(-3.0..3.0)).collect();
                let p = set.lmo(&g).unwrap();
                assert!(set.contains(&p, 1e-9).unwrap(), "{} lmo infeasible", set.kind());
                let gp = dot(&g, &p);
                for u in &us {
                    assert!(gp <= dot(&g, u) + 1e-12, "{}: lmo not optimal", set.kind());
                }
            }
        }
    }

    #[test]
    fn samples_fit_inside_the_diameter() {
        for set in all_sets() {
            let diam = set.diameter();
            for s in 0..50u64 {
                let a = set.sample(s);
                let b = set.sample(s + 1000);
                assert!(set.contains(&a, 1e-9).unwrap());
                assert!(dist(&a, &b) <= diam + 1e-12, "{}", set.kind());
            }
        }
    }

    #[test]
    fn lmo_rejects_bad_gradients() {
        let s = ProbabilitySimplex::new(3).unwrap();
        assert!(matches!(
            s.lmo(&[1.0, 2.0]),
            Err(crate::Error::DimensionMismatch { expected: 3, got: 2 })
        ));
        assert!(matches!(
            s.lmo(&[1.0, f64::NAN, 0.0]),
            Err(crate::Error::NonFinite(_))
        ));
        assert!(s.contains(&[1.0], 0.0).is_err());
    }

    #[test]
    fn argmin_prefers_lowest_index() {
        assert_eq!(argmin_first([2.0, 1.0, 1.0, 3.0]), 1);
        assert_eq!(argmin_first([0.0, 0.0]), 0);
    }
}
