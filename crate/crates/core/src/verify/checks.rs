use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::FeasibleSet;
use crate::linalg::{dist, dot, norm, sub};
use crate::objectives::Objective;

const MAX_STORED_VIOLATIONS: usize = 100;
const CONVEXITY_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StarViolation {
    pub x: Vec<f64>,
    pub lambda: f64,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StarConvexityReport {
    pub n_samples: usize,
    pub n_lambdas: usize,
    pub tol: f64,
    pub n_violations: usize,
    /// First violations found, at most 100.
    pub violations: Vec<StarViolation>,
    /// Largest `lhs − rhs` seen, floored at 0.
    pub max_violation: f64,
    /// Points (samples or segment points) with `f < f(x*) − tol`, which
    /// refute the claim that `x*` is a minimizer.
    pub n_below_minimum: usize,
    /// The lowest such point and its value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lowest: Option<(Vec<f64>, f64)>,
}

impl StarConvexityReport {
    pub fn passed(&self) -> bool {
        self.n_violations == 0 && self.n_below_minimum == 0
    }

    fn note_value(&mut self, z: &[f64], fz: f64, f_star: f64) {
        if fz < f_star - self.tol {
            self.n_below_minimum += 1;
            if self.lowest.as_ref().is_none_or(|(_, f)| fz < *f) {
                self.lowest = Some((z.to_vec(), fz));
            }
        }
    }
}

fn require_feasible(set: &dyn FeasibleSet, x: &[f64]) -> Result<()> {
    if !set.contains(x, 1e-9)? {
        return Err(Error::Infeasible {
            violation: set.violation(x),
            tol: 1e-9,
        });
    }
    Ok(())
}

fn lambda_grid(n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![0.5],
        _ => (0..n).map(|i| i as f64 / (n - 1) as f64).collect(),
    }
}

/// Samples `f(λx* + (1−λ)x) <= λ f(x*) + (1−λ) f(x)` on `n_samples` feasible
/// points and a uniform grid of `n_lambdas` values in `[0, 1]`, and checks
/// that no evaluated point falls below `f(x*)`.
pub fn check_star_convexity(
    objective: &dyn Objective,
    set: &dyn FeasibleSet,
    x_star: &[f64],
    n_samples: usize,
    n_lambdas: usize,
    tol: f64,
    seed: u64,
) -> Result<StarConvexityReport> {
    require_feasible(set, x_star)?;
    let f_star = objective.value(x_star)?;
    let grid = lambda_grid(n_lambdas);
    let mut report = StarConvexityReport {
        n_samples,
        n_lambdas,
        tol,
        n_violations: 0,
        violations: Vec::new(),
        max_violation: 0.0,
        n_below_minimum: 0,
        lowest: None,
    };
    for x in super::sample_points(set, n_samples, seed) {
        let fx = objective.value(&x)?;
        report.note_value(&x, fx, f_star);
        for &lam in &grid {
            let z: Vec<f64> = x_star
                .iter()
                .zip(&x)
                .map(|(s, xi)| lam * s + (1.0 - lam) * xi)
                .collect();
            let lhs = objective.value(&z)?;
            if lam > 0.0 && lam < 1.0 {
                report.note_value(&z, lhs, f_star);
            }
            let rhs = lam * f_star + (1.0 - lam) * fx;
            report.max_violation = report.max_violation.max(lhs - rhs);
            if lhs > rhs + tol {
                report.n_violations += 1;
                if report.violations.len() < MAX_STORED_VIOLATIONS {
                    report.violations.push(StarViolation {
                        x: x.clone(),
                        lambda: lam,
                        lhs,
                        rhs,
                    });
                }
            }
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradientInequalityReport {
    pub n_samples: usize,
    pub n_violations: usize,
    pub max_violation: f64,
}

/// Samples `f* − f(x) >= ∇f(x)ᵀ(x* − x)`; points where the gradient is
/// singular are skipped.
pub fn check_gradient_inequality(
    objective: &dyn Objective,
    set: &dyn FeasibleSet,
    x_star: &[f64],
    n_samples: usize,
    tol: f64,
    seed: u64,
) -> Result<GradientInequalityReport> {
    require_feasible(set, x_star)?;
    let f_star = objective.value(x_star)?;
    let mut report = GradientInequalityReport {
        n_samples,
        n_violations: 0,
        max_violation: 0.0,
    };
    for x in super::sample_points(set, n_samples, seed) {
        let g = match objective.gradient(&x) {
            Ok(g) => g,
            Err(Error::Singular(_)) => continue,
            Err(e) => return Err(e),
        };
        let excess = dot(&g, &sub(x_star, &x)) - (f_star - objective.value(&x)?);
        report.max_violation = report.max_violation.max(excess);
        if excess > tol {
            report.n_violations += 1;
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexityWitness {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// `f(x) + ∇f(x)ᵀ(y − x) − f(y)`, positive for a witness.
    pub excess: f64,
}

/// First sampled pair with `f(y) < f(x) + ∇f(x)ᵀ(y − x) − 1e−9`, trying both
/// orders of each pair.
pub fn find_convexity_violation(
    objective: &dyn Objective,
    set: &dyn FeasibleSet,
    n_samples: usize,
    seed: u64,
) -> Result<Option<ConvexityWitness>> {
    let pts = super::sample_points(set, 2 * n_samples, seed);
    for pair in pts.chunks_exact(2) {
        for (x, y) in [(&pair[0], &pair[1]), (&pair[1], &pair[0])] {
            let g = match objective.gradient(x) {
                Ok(g) => g,
                Err(Error::Singular(_)) => continue,
                Err(e) => return Err(e),
            };
            let excess = objective.value(x)? + dot(&g, &sub(y, x)) - objective.value(y)?;
            if excess > CONVEXITY_SLACK {
                return Ok(Some(ConvexityWitness {
                    x: x.clone(),
                    y: y.clone(),
                    excess,
                }));
            }
        }
    }
    Ok(None)
}

/// Largest sampled `‖∇f(x) − ∇f(y)‖ / ‖x − y‖`, a lower estimate of the
/// gradient-Lipschitz constant on the set.
pub fn estimate_lipschitz(
    objective: &dyn Objective,
    set: &dyn FeasibleSet,
    n_samples: usize,
    seed: u64,
) -> Result<f64> {
    let pts = super::sample_points(set, 2 * n_samples, seed);
    let mut best = 0.0f64;
    for pair in pts.chunks_exact(2) {
        let h = dist(&pair[0], &pair[1]);
        if h == 0.0 {
            continue;
        }
        let gx = objective.gradient(&pair[0])?;
        let gy = objective.gradient(&pair[1])?;
        best = best.max(dist(&gx, &gy) / h);
    }
    Ok(best)
}

/// Largest `‖∇f‖` over sampled points of the set. Half of the points come
/// from the sampler, half from the oracle on random directions so that
/// extreme points are represented.
pub fn estimate_gradient_bound(
    objective: &dyn Objective,
    set: &dyn FeasibleSet,
    n_samples: usize,
    seed: u64,
) -> Result<f64> {
    let interior = super::sample_points(set, n_samples - n_samples / 2, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut best = 0.0f64;
    for x in interior {
        best = best.max(norm(&objective.gradient(&x)?));
    }
    for _ in 0..n_samples / 2 {
        let dir: Vec<f64> = (0..set.dim()).map(|_| rng.sample(StandardNormal)).collect();
        let p = set.lmo(&dir)?;
        best = best.max(norm(&objective.gradient(&p)?));
    }
    Ok(best)
}

fn central_gradient(objective: &dyn Objective, x: &[f64], h: f64) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(x.len());
    let mut probe = x.to_vec();
    for i in 0..x.len() {
        probe[i] = x[i] + h;
        let up = objective.value(&probe)?;
        probe[i] = x[i] - h;
        let down = objective.value(&probe)?;
        probe[i] = x[i];
        out.push((up - down) / (2.0 * h));
    }
    Ok(out)
}

/// Largest `‖∇f(x) − ∇_h f(x)‖ / max(‖∇f(x)‖, 1)` over `n_points` sampled
/// points, with `∇_h` the central difference of step `h`.
pub fn gradient_fd_error(
    objective: &dyn Objective,
    set: &dyn FeasibleSet,
    n_points: usize,
    h: f64,
    seed: u64,
) -> Result<f64> {
    let mut worst = 0.0f64;
    for x in super::sample_points(set, n_points, seed) {
        let g = objective.gradient(&x)?;
        let fd = central_gradient(objective, &x, h)?;
        worst = worst.max(dist(&g, &fd) / norm(&g).max(1.0));
    }
    Ok(worst)
}

/// Largest relative Frobenius error between the Hessian and central
/// differences of the gradient.
pub fn hessian_fd_error(
    objective: &dyn Objective,
    set: &dyn FeasibleSet,
    n_points: usize,
    h: f64,
    seed: u64,
) -> Result<f64> {
    let mut worst = 0.0f64;
    for x in super::sample_points(set, n_points, seed) {
        let hess = objective.hessian(&x)?;
        let n = x.len();
        let mut fd = DMatrix::<f64>::zeros(n, n);
        let mut probe = x.clone();
        for j in 0..n {
            probe[j] = x[j] + h;
            let up = objective.gradient(&probe)?;
            probe[j] = x[j] - h;
            let down = objective.gradient(&probe)?;
            probe[j] = x[j];
            for i in 0..n {
                fd[(i, j)] = (up[i] - down[i]) / (2.0 * h);
            }
        }
        worst = worst.max((&hess - fd).norm() / hess.norm().max(1.0));
    }
    Ok(worst)
}

/// Largest `|f(λx) − λ^deg f(x)| / (1 + |f(x)|)` over random `x ∈ R^dim`
/// and `λ ∈ (0, 1]`.
pub fn check_homogeneity(objective: &dyn Objective, dim: usize, n: usize, seed: u64) -> Result<f64> {
    let deg = objective
        .homogeneity_degree()
        .ok_or_else(|| Error::Unsupported(format!("{} is not homogeneous", objective.name())))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..n {
        let x: Vec<f64> = (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let lam = 1.0 - rng.random::<f64>();
        let fx = objective.value(&x)?;
        let scaled: Vec<f64> = x.iter().map(|v| lam * v).collect();
        let err = (objective.value(&scaled)? - lam.powf(deg) * fx).abs() / (1.0 + fx.abs());
        worst = worst.max(err);
    }
    Ok(worst)
}
