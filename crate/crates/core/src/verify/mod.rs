//! Sampling checkers for star-convexity and related inequalities, and audits
//! of recorded runs against the iteration-complexity bounds.

mod audits;
mod checks;

pub use audits::{
    audit_adaptive_descent, audit_all, audit_armijo_descent, audit_armijo_rate, audit_fcr_rates,
    audit_lipschitz_corridor, BoundAuditReport, BoundCheck, AUDIT_TOL_REL,
};
pub use checks::{
    check_gradient_inequality, check_homogeneity, check_star_convexity, estimate_gradient_bound,
    estimate_lipschitz, find_convexity_violation, gradient_fd_error, hessian_fd_error,
    ConvexityWitness, GradientInequalityReport, StarConvexityReport, StarViolation,
};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::geometry::FeasibleSet;

/// `n` points drawn from one seeded stream, so a shorter run is a prefix of
/// a longer one.
pub fn sample_points(set: &dyn FeasibleSet, n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| set.sample_with(&mut rng)).collect()
}
