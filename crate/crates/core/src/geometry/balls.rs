use rand::{Rng, RngCore};
use rand_distr::{Distribution, Exp1, StandardNormal};

use super::FeasibleSet;
use crate::error::{Error, Result};
use crate::linalg::{check_finite, dist, norm};

fn validate(radius: f64, center: &[f64]) -> Result<()> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::invalid("radius", "must be a positive finite number"));
    }
    if center.is_empty() {
        return Err(Error::invalid("center", "must have at least one coordinate"));
    }
    check_finite(center, "ball center")
}

/// Radius factor `r * U^(1/n)`, uniform in volume for both balls.
fn radial(rng: &mut dyn RngCore, radius: f64, n: usize) -> f64 {
    let u: f64 = rng.random();
    radius * u.powf(1.0 / n as f64)
}

/// `{x : ||x - center||_1 <= radius}`.
#[derive(Debug, Clone, PartialEq)]
pub struct L1Ball {
    radius: f64,
    center: Vec<f64>,
}

impl L1Ball {
    pub fn new(radius: f64, center: Vec<f64>) -> Result<Self> {
        validate(radius, &center)?;
        Ok(Self { radius, center })
    }

    pub fn centered(radius: f64, n: usize) -> Result<Self> {
        Self::new(radius, vec![0.0; n])
    }
}

impl FeasibleSet for L1Ball {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn kind(&self) -> &'static str {
        "l1"
    }

    fn minimize_linear(&self, g: &[f64]) -> Vec<f64> {
        let mut p = self.center.clone();
        let mut best = 0;
        for (i, gi) in g.iter().enumerate() {
            if gi.abs() > g[best].abs() {
                best = i;
            }
        }
        if g[best] != 0.0 {
            p[best] -= self.radius * g[best].signum();
        }
        p
    }

    fn diameter(&self) -> f64 {
        2.0 * self.radius
    }

    fn violation(&self, x: &[f64]) -> f64 {
        let r: f64 = x.iter().zip(&self.center).map(|(a, c)| (a - c).abs()).sum();
        (r - self.radius).max(0.0)
    }

    fn max_abs_coordinate(&self) -> f64 {
        self.center.iter().fold(0.0f64, |m, c| m.max(c.abs())) + self.radius
    }

    fn sample_with(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        let n = self.dim();
        let mut dir: Vec<f64> = (0..n)
            .map(|_| {
                let e: f64 = Exp1.sample(rng);
                if rng.random_bool(0.5) {
                    e
                } else {
                    -e
                }
            })
            .collect();
        let l1: f64 = dir.iter().map(|v| v.abs()).sum();
        if l1 > 0.0 {
            dir.iter_mut().for_each(|v| *v /= l1);
        }
        let r = radial(rng, self.radius, n);
        self.center.iter().zip(&dir).map(|(c, d)| c + r * d).collect()
    }
}

/// `{x : ||x - center||_2 <= radius}`.
#[derive(Debug, Clone, PartialEq)]
pub struct L2Ball {
    radius: f64,
    center: Vec<f64>,
}

impl L2Ball {
    pub fn new(radius: f64, center: Vec<f64>) -> Result<Self> {
        validate(radius, &center)?;
        Ok(Self { radius, center })
    }

    pub fn centered(radius: f64, n: usize) -> Result<Self> {
        Self::new(radius, vec![0.0; n])
    }
}

impl FeasibleSet for L2Ball {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn kind(&self) -> &'static str {
        "l2"
    }

    fn minimize_linear(&self, g: &[f64]) -> Vec<f64> {
        let gn = norm(g);
        if gn == 0.0 {
            return self.center.clone();
        }
        self.center
            .iter()
            .zip(g)
            .map(|(c, gi)| c - self.radius * gi / gn)
            .collect()
    }

    fn diameter(&self) -> f64 {
        2.0 * self.radius
    }

    fn violation(&self, x: &[f64]) -> f64 {
        (dist(x, &self.center) - self.radius).max(0.0)
    }

    fn max_abs_coordinate(&self) -> f64 {
        self.center.iter().fold(0.0f64, |m, c| m.max(c.abs())) + self.radius
    }

    fn sample_with(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        let n = self.dim();
        let dir = loop {
            let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
            let vn = norm(&v);
            if vn > 0.0 {
                break v.into_iter().map(|x| x / vn).collect::<Vec<f64>>();
            }
        };
        let r = radial(rng, self.radius, n);
        self.center.iter().zip(&dir).map(|(c, d)| c + r * d).collect()
    }
}
