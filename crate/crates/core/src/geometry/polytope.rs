use nalgebra::{DMatrix, DVector};
use rand::RngCore;
use rand_distr::{Distribution, Exp1};

use super::{argmin_first, FeasibleSet};
use crate::error::{Error, Result};
use crate::linalg::{check_finite, dist, dot, norm, norm_sq, sub};

/// Convex hull of a finite list of vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexPolytope {
    vertices: Vec<Vec<f64>>,
    diameter: f64,
}

impl VertexPolytope {
    pub fn new(vertices: Vec<Vec<f64>>) -> Result<Self> {
        let Some(first) = vertices.first() else {
            return Err(Error::invalid("vertices", "at least one vertex is required"));
        };
        let n = first.len();
        if n == 0 {
            return Err(Error::invalid("vertices", "vertices must be non-empty vectors"));
        }
        for (i, v) in vertices.iter().enumerate() {
            if v.len() != n {
                return Err(Error::invalid(
                    "vertices",
                    format!("vertex {i} has dimension {}, expected {n}", v.len()),
                ));
            }
            check_finite(v, "polytope vertex")?;
        }
        let mut diameter = 0.0f64;
        for i in 0..vertices.len() {
            for j in i + 1..vertices.len() {
                diameter = diameter.max(dist(&vertices[i], &vertices[j]));
            }
        }
        Ok(Self { vertices, diameter })
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    /// Index of the vertex returned by the oracle for `g`.
    pub fn lmo_index(&self, g: &[f64]) -> usize {
        argmin_first(self.vertices.iter().map(|v| dot(g, v)))
    }

    /// Euclidean distance from `x` to the hull together with the convex
    /// weights of the nearest hull point.
    pub fn distance_to_hull(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let shifted: Vec<Vec<f64>> = self.vertices.iter().map(|v| sub(v, x)).collect();
        let (weights, point) = min_norm_point(&shifted);
        (norm(&point), weights)
    }
}

impl FeasibleSet for VertexPolytope {
    fn dim(&self) -> usize {
        self.vertices[0].len()
    }

    fn kind(&self) -> &'static str {
        "polytope"
    }

    fn minimize_linear(&self, g: &[f64]) -> Vec<f64> {
        self.vertices[self.lmo_index(g)].clone()
    }

    fn diameter(&self) -> f64 {
        self.diameter
    }

    fn violation(&self, x: &[f64]) -> f64 {
        self.distance_to_hull(x).0
    }

    fn max_abs_coordinate(&self) -> f64 {
        self.vertices
            .iter()
            .flatten()
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }

    fn sample_with(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        let w: Vec<f64> = (0..self.vertices.len()).map(|_| Exp1.sample(rng)).collect();
        let total: f64 = w.iter().sum();
        let mut x = vec![0.0; self.dim()];
        for (wi, v) in w.iter().zip(&self.vertices) {
            let t = if total > 0.0 { wi / total } else { 1.0 / w.len() as f64 };
            x.iter_mut().zip(v).for_each(|(xj, vj)| *xj += t * vj);
        }
        x
    }
}

/// Minimum-norm point of the convex hull of `points` (Wolfe's active-set
/// method). Returns the convex weights and the point itself.
///
/// The method terminates in finitely many steps in exact arithmetic; here
/// the outer loop is additionally capped and stops early when the optimality
/// certificate `|x|^2 - min_j p_j^T x` falls below a relative `1e-12`.
pub fn min_norm_point(points: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let m = points.len();
    let scale = points.iter().map(|p| norm_sq(p)).fold(0.0f64, f64::max);
    let eps = 1e-12 * scale.max(f64::MIN_POSITIVE);
    let weight_eps = 1e-14;

    let start = argmin_first(points.iter().map(|p| norm_sq(p)));
    let mut active = vec![start];
    let mut weights = vec![1.0];
    let mut x = points[start].clone();

    let combine = |active: &[usize], weights: &[f64]| -> Vec<f64> {
        let mut y = vec![0.0; points[0].len()];
        for (&i, &w) in active.iter().zip(weights) {
            y.iter_mut().zip(&points[i]).for_each(|(yj, pj)| *yj += w * pj);
        }
        y
    };

    'major: for _ in 0..(10 * m + 100) {
        let xx = norm_sq(&x);
        let j = argmin_first(points.iter().map(|p| dot(p, &x)));
        if xx - dot(&points[j], &x) <= eps || active.contains(&j) {
            break;
        }
        active.push(j);
        weights.push(0.0);

        for _ in 0..=active.len() {
            let Some(alpha) = affine_min_norm(points, &active) else {
                break 'major;
            };
            if alpha.iter().all(|&a| a > weight_eps) {
                weights = alpha;
                x = combine(&active, &weights);
                continue 'major;
            }
            let mut theta = 1.0f64;
            for (w, a) in weights.iter().zip(&alpha) {
                if *a <= weight_eps && w - a > 0.0 {
                    theta = theta.min(w / (w - a));
                }
            }
            for (w, a) in weights.iter_mut().zip(&alpha) {
                *w = theta * a + (1.0 - theta) * *w;
            }
            // drop the vertices whose weight vanished; at least the smallest one
            let smallest = argmin_first(weights.iter().copied());
            let mut keep_active = Vec::with_capacity(active.len());
            let mut keep_weights = Vec::with_capacity(active.len());
            for (idx, (&i, &w)) in active.iter().zip(&weights).enumerate() {
                if w > weight_eps && idx != smallest {
                    keep_active.push(i);
                    keep_weights.push(w);
                }
            }
            if keep_active.is_empty() {
                keep_active.push(active[argmin_first(weights.iter().map(|w| -w))]);
                keep_weights.push(1.0);
            }
            let total: f64 = keep_weights.iter().sum();
            keep_weights.iter_mut().for_each(|w| *w /= total);
            active = keep_active;
            weights = keep_weights;
            x = combine(&active, &weights);
        }
        break;
    }

    let mut full = vec![0.0; m];
    for (&i, &w) in active.iter().zip(&weights) {
        full[i] += w;
    }
    (full, x)
}

/// Weights of the minimum-norm point of the affine hull of the active points.
fn affine_min_norm(points: &[Vec<f64>], active: &[usize]) -> Option<Vec<f64>> {
    let k = active.len();
    let mut a = DMatrix::<f64>::zeros(k + 1, k + 1);
    for (r, &i) in active.iter().enumerate() {
        for (c, &j) in active.iter().enumerate() {
            a[(r, c)] = dot(&points[i], &points[j]);
        }
        a[(r, k)] = 1.0;
        a[(k, r)] = 1.0;
    }
    let mut rhs = DVector::<f64>::zeros(k + 1);
    rhs[k] = 1.0;
    let sol = a.lu().solve(&rhs)?;
    let alpha: Vec<f64> = sol.iter().take(k).copied().collect();
    if alpha.iter().all(|v| v.is_finite()) {
        Some(alpha)
    } else {
        None
    }
}
