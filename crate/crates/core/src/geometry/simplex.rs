use rand::RngCore;
use rand_distr::{Distribution, Exp1};

use super::{argmin_first, FeasibleSet};
use crate::error::{Error, Result};

/// `{x >= 0, sum x = 1}` in R^n.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilitySimplex {
    n: usize,
}

impl ProbabilitySimplex {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid("n", "simplex dimension must be at least 2"));
        }
        Ok(Self { n })
    }
}

impl FeasibleSet for ProbabilitySimplex {
    fn dim(&self) -> usize {
        self.n
    }

    fn kind(&self) -> &'static str {
        "simplex"
    }

    fn minimize_linear(&self, g: &[f64]) -> Vec<f64> {
        let mut p = vec![0.0; self.n];
        p[argmin_first(g.iter().copied())] = 1.0;
        p
    }

    fn diameter(&self) -> f64 {
        std::f64::consts::SQRT_2
    }

    fn violation(&self, x: &[f64]) -> f64 {
        let neg = x.iter().fold(0.0f64, |m, &v| m.max(-v));
        let sum: f64 = x.iter().sum();
        neg.max((sum - 1.0).abs())
    }

    fn max_abs_coordinate(&self) -> f64 {
        1.0
    }

    fn sample_with(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        let mut e: Vec<f64> = (0..self.n).map(|_| Exp1.sample(rng)).collect();
        let total: f64 = e.iter().sum();
        if total > 0.0 {
            e.iter_mut().for_each(|v| *v /= total);
        } else {
            e.iter_mut().for_each(|v| *v = 1.0 / self.n as f64);
        }
        e
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lmo_picks_smallest_coordinate() {
        let s = ProbabilitySimplex::new(3).unwrap();
        assert_eq!(s.lmo(&[3.0, 1.0, 2.0]).unwrap(), vec![0.0, 1.0, 0.0]);
        assert_eq!(s.lmo(&[1.0, 1.0, 2.0]).unwrap(), vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn diameter_is_sqrt_two() {
        // max over pairs of unit vertices e_i, e_j
        let s = ProbabilitySimplex::new(3).unwrap();
        let mut best = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                let mut a = [0.0; 3];
                let mut b = [0.0; 3];
                a[i] = 1.0;
                b[j] = 1.0;
                best = best.max(crate::linalg::dist(&a, &b));
            }
        }
        assert_eq!(s.diameter(), best);
    }

    #[test]
    fn membership() {
        let s = ProbabilitySimplex::new(2).unwrap();
        assert!(s.contains(&[0.5, 0.5], 0.0).unwrap());
        assert!(!s.contains(&[0.6, 0.5], 1e-6).unwrap());
        assert!(!s.contains(&[-0.1, 1.1], 1e-6).unwrap());
    }

    #[test]
    fn samples_are_distributions_and_deterministic() {
        let s = ProbabilitySimplex::new(3).unwrap();
        let a = s.sample(42);
        assert!(a.iter().all(|&v| v >= 0.0));
        assert!((a.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(a, s.sample(42));
        assert_ne!(a, s.sample(43));
    }

    #[test]
    fn rejects_tiny_dimension() {
        assert!(ProbabilitySimplex::new(1).is_err());
    }
}
