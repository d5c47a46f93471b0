use rand::{Rng, RngCore};

use super::FeasibleSet;
use crate::error::{Error, Result};
use crate::linalg::{check_finite, dist};

/// Axis-aligned box `lower <= x <= upper`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxSet {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl BoxSet {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() {
            return Err(Error::invalid("lower", "box must have at least one coordinate"));
        }
        if lower.len() != upper.len() {
            return Err(Error::invalid(
                "upper",
                format!("length {} differs from lower length {}", upper.len(), lower.len()),
            ));
        }
        check_finite(&lower, "box lower bound")?;
        check_finite(&upper, "box upper bound")?;
        if let Some(i) = (0..lower.len()).find(|&i| lower[i] > upper[i]) {
            return Err(Error::invalid(
                "lower",
                format!("lower[{i}] = {} exceeds upper[{i}] = {}", lower[i], upper[i]),
            ));
        }
        Ok(Self { lower, upper })
    }

    /// The cube `[lo, hi]^n`.
    pub fn cube(n: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo; n], vec![hi; n])
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }
}

impl FeasibleSet for BoxSet {
    fn dim(&self) -> usize {
        self.lower.len()
    }

    fn kind(&self) -> &'static str {
        "box"
    }

    // g_i > 0 -> lower, g_i < 0 -> upper; a zero component takes the lower bound.
    fn minimize_linear(&self, g: &[f64]) -> Vec<f64> {
        g.iter()
            .enumerate()
            .map(|(i, &gi)| if gi < 0.0 { self.upper[i] } else { self.lower[i] })
            .collect()
    }

    fn diameter(&self) -> f64 {
        dist(&self.upper, &self.lower)
    }

    fn violation(&self, x: &[f64]) -> f64 {
        x.iter()
            .enumerate()
            .fold(0.0f64, |m, (i, &v)| m.max(self.lower[i] - v).max(v - self.upper[i]))
    }

    fn max_abs_coordinate(&self) -> f64 {
        self.lower
            .iter()
            .chain(&self.upper)
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }

    fn sample_with(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(&l, &u)| {
                let t: f64 = rng.random();
                (l + (u - l) * t).clamp(l, u)
            })
            .collect()
    }
}
