use nalgebra::{DMatrix, DVector};

use super::Objective;
use crate::error::{Error, Result};
use crate::geometry::FeasibleSet;
use crate::linalg::{check_finite, dist_sq, dot, sub};

const POWER_TOL: f64 = 1e-10;
const POWER_MAX_ITERS: usize = 10_000;

/// `f(x) = ½ xᵀQx + bᵀx + c` with symmetric `Q`.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadratic {
    q: DMatrix<f64>,
    b: Vec<f64>,
    c: f64,
    lipschitz: f64,
    /// Set for `½‖x − center‖²`, which is then evaluated in shifted form:
    /// the expanded polynomial cancels catastrophically near the center.
    center: Option<Vec<f64>>,
}

impl Quadratic {
    pub fn new(q: Vec<Vec<f64>>, b: Vec<f64>, c: f64) -> Result<Self> {
        let n = b.len();
        if n == 0 {
            return Err(Error::invalid("b", "must have at least one entry"));
        }
        if q.len() != n || q.iter().any(|row| row.len() != n) {
            return Err(Error::invalid("Q", format!("must be a {n}x{n} matrix")));
        }
        for row in &q {
            check_finite(row, "Q")?;
        }
        check_finite(&b, "b")?;
        if !c.is_finite() {
            return Err(Error::NonFinite("c"));
        }
        for i in 0..n {
            for j in 0..i {
                let (a, t) = (q[i][j], q[j][i]);
                if (a - t).abs() > 1e-12 * a.abs().max(t.abs()).max(1.0) {
                    return Err(Error::invalid(
                        "Q",
                        format!("not symmetric: Q[{i}][{j}] = {a} but Q[{j}][{i}] = {t}"),
                    ));
                }
            }
        }
        let q = DMatrix::from_fn(n, n, |i, j| q[i][j]);
        let lipschitz = spectral_radius(&q);
        Ok(Self {
            q,
            b,
            c,
            lipschitz,
            center: None,
        })
    }

    /// `½‖x − center‖²`.
    pub fn squared_distance(center: &[f64]) -> Result<Self> {
        let n = center.len();
        let q = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        let b = center.iter().map(|v| -v).collect();
        let mut f = Self::new(q, b, 0.5 * dot(center, center))?;
        f.center = Some(center.to_vec());
        Ok(f)
    }

    pub fn q(&self) -> &DMatrix<f64> {
        &self.q
    }

    /// Largest eigenvalue magnitude of `Q`.
    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    fn qx(&self, x: &[f64]) -> DVector<f64> {
        &self.q * DVector::from_column_slice(x)
    }
}

/// Largest eigenvalue magnitude by power iteration on two fixed start vectors.
fn spectral_radius(q: &DMatrix<f64>) -> f64 {
    let n = q.nrows();
    let starts = [
        DVector::from_fn(n, |i, _| 1.0 + i as f64 / (n as f64 + 1.0)),
        DVector::from_fn(n, |i, _| if i % 2 == 0 { 1.0 } else { -0.5 } / (i as f64 + 1.0)),
    ];
    starts
        .into_iter()
        .map(|start| power_iteration(q, start))
        .fold(0.0, f64::max)
}

fn power_iteration(q: &DMatrix<f64>, start: DVector<f64>) -> f64 {
    let mut v = start.normalize();
    let mut est = 0.0;
    for _ in 0..POWER_MAX_ITERS {
        let w = q * &v;
        let next = w.norm();
        if next == 0.0 {
            return est;
        }
        let done = (next - est).abs() <= POWER_TOL * next;
        est = next;
        v = w / next;
        if done {
            break;
        }
    }
    est
}

impl Objective for Quadratic {
    fn name(&self) -> &'static str {
        "quadratic"
    }

    fn dim(&self) -> Option<usize> {
        Some(self.b.len())
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        self.check_input(x)?;
        if let Some(center) = &self.center {
            return Ok(0.5 * dist_sq(x, center));
        }
        let qx = self.qx(x);
        Ok(0.5 * dot(x, qx.as_slice()) + dot(&self.b, x) + self.c)
    }

    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_input(x)?;
        if let Some(center) = &self.center {
            return Ok(sub(x, center));
        }
        let qx = self.qx(x);
        Ok(qx.iter().zip(&self.b).map(|(a, b)| a + b).collect())
    }

    fn hessian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        self.check_input(x)?;
        Ok(self.q.clone())
    }

    /// The unconstrained minimizer `−Q⁻¹b` when `Q` is positive definite.
    fn minimizer(&self) -> Option<Vec<f64>> {
        if let Some(center) = &self.center {
            return Some(center.clone());
        }
        let chol = self.q.clone().cholesky()?;
        let x = chol.solve(&-DVector::from_column_slice(&self.b));
        Some(x.iter().copied().collect())
    }

    fn lipschitz_on(&self, _set: &dyn FeasibleSet) -> Option<f64> {
        Some(self.lipschitz)
    }
}
