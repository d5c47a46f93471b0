use super::Objective;
use crate::error::{Error, Result};
use crate::linalg::norm;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PowerKind {
    /// `(Σ|x_i|^p)^{1/p}`; `p = 0` is the geometric mean of `|x_i|`.
    PNorm { p: f64 },
    /// `‖x‖^r` for `0 < r < 1`.
    NormPower { r: f64 },
}

/// Positively homogeneous, nonnegative functions whose gradient blows up at
/// the minimizer. Only the checkers accept them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomogeneousPower {
    kind: PowerKind,
}

impl HomogeneousPower {
    pub fn pnorm(p: f64) -> Result<Self> {
        if !p.is_finite() {
            return Err(Error::invalid("p", "must be finite"));
        }
        Ok(Self { kind: PowerKind::PNorm { p } })
    }

    pub fn norm_power(r: f64) -> Result<Self> {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::invalid("r", "must lie in (0, 1)"));
        }
        Ok(Self { kind: PowerKind::NormPower { r } })
    }

    pub fn kind(&self) -> PowerKind {
        self.kind
    }
}

impl Objective for HomogeneousPower {
    fn name(&self) -> &'static str {
        match self.kind {
            PowerKind::PNorm { .. } => "pnorm",
            PowerKind::NormPower { .. } => "norm_power",
        }
    }

    fn dim(&self) -> Option<usize> {
        None
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        self.check_input(x)?;
        if x.is_empty() {
            return Err(Error::invalid("x", "empty argument"));
        }
        Ok(match self.kind {
            PowerKind::NormPower { r } => norm(x).powf(r),
            PowerKind::PNorm { p: 0.0 } => {
                if x.contains(&0.0) {
                    0.0
                } else {
                    let mean_log = x.iter().map(|v| v.abs().ln()).sum::<f64>() / x.len() as f64;
                    mean_log.exp()
                }
            }
            PowerKind::PNorm { p } => {
                // continuous extension: a zero coordinate forces the value to 0 when p < 0
                if p < 0.0 && x.contains(&0.0) {
                    0.0
                } else {
                    let s: f64 = x.iter().map(|v| v.abs().powf(p)).sum();
                    s.powf(1.0 / p)
                }
            }
        })
    }

    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_input(x)?;
        match self.kind {
            PowerKind::NormPower { r } => {
                let nx = norm(x);
                if nx == 0.0 {
                    return Err(Error::Singular("norm power at the origin".into()));
                }
                let scale = r * nx.powf(r - 2.0);
                Ok(x.iter().map(|v| scale * v).collect())
            }
            PowerKind::PNorm { p } => {
                let has_zero = x.contains(&0.0);
                let all_zero = x.iter().all(|&v| v == 0.0);
                if all_zero || (p <= 1.0 && has_zero) {
                    return Err(Error::Singular(format!(
                        "p-norm with p = {p} at a point with a zero coordinate"
                    )));
                }
                let f = self.value(x)?;
                if p == 0.0 {
                    let n = x.len() as f64;
                    return Ok(x.iter().map(|v| f / (n * v)).collect());
                }
                let lead = f.powf(1.0 - p);
                Ok(x
                    .iter()
                    .map(|v| lead * v.abs().powf(p - 1.0) * v.signum())
                    .collect())
            }
        }
    }

    fn minimizer(&self) -> Option<Vec<f64>> {
        None
    }

    fn checker_only(&self) -> bool {
        true
    }

    fn homogeneity_degree(&self) -> Option<f64> {
        Some(match self.kind {
            PowerKind::PNorm { .. } => 1.0,
            PowerKind::NormPower { r } => r,
        })
    }
}
