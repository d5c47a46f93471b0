use super::Objective;
use crate::error::{Error, Result};
use crate::linalg::{check_dim, check_finite, dist_sq, dot, norm, norm_sq, sub};

const MEMBERSHIP_TOL: f64 = 1e-12;

/// Convex building block of a star-shaped union, with a closed-form projection.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Box { lower: Vec<f64>, upper: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
    Segment { a: Vec<f64>, b: Vec<f64> },
}

impl Shape {
    pub fn dim(&self) -> usize {
        match self {
            Shape::Box { lower, .. } => lower.len(),
            Shape::Ball { center, .. } => center.len(),
            Shape::Segment { a, .. } => a.len(),
        }
    }

    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Shape::Box { lower, upper } => x
                .iter()
                .zip(lower.iter().zip(upper))
                .map(|(v, (l, u))| v.clamp(*l, *u))
                .collect(),
            Shape::Ball { center, radius } => {
                let off = sub(x, center);
                let r = norm(&off);
                if r <= *radius {
                    x.to_vec()
                } else {
                    center
                        .iter()
                        .zip(&off)
                        .map(|(c, o)| c + radius * o / r)
                        .collect()
                }
            }
            Shape::Segment { a, b } => {
                let ab = sub(b, a);
                let len = norm_sq(&ab);
                if len == 0.0 {
                    return a.clone();
                }
                let t = (dot(&sub(x, a), &ab) / len).clamp(0.0, 1.0);
                a.iter().zip(&ab).map(|(ai, di)| ai + t * di).collect()
            }
        }
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        dist_sq(x, &self.project(x)).sqrt() <= tol
    }
}

/// Minimum squared distance from `x` to a union of shapes and the nearest
/// point attaining it; the lowest-index member wins ties.
pub fn distance_squared(members: &[Shape], x: &[f64]) -> Result<(f64, Vec<f64>)> {
    let Some(first) = members.first() else {
        return Err(Error::invalid("members", "union has no members"));
    };
    check_dim(first.dim(), x.len())?;
    let mut best = (f64::INFINITY, Vec::new());
    for m in members {
        check_dim(m.dim(), x.len())?;
        let p = m.project(x);
        let d = dist_sq(x, &p);
        if d < best.0 {
            best = (d, p);
        }
    }
    Ok(best)
}

/// One weighted term `w · d²_S(x)` where `S` is a union of shapes.
#[derive(Debug, Clone, PartialEq)]
pub struct Piece {
    pub weight: f64,
    pub members: Vec<Shape>,
}

/// `f(x) = Σ w_i d²_{S_i}(x)` over unions `S_i` that all contain the declared
/// common points, so every common point is a global minimizer with value 0.
#[derive(Debug, Clone, PartialEq)]
pub struct StarShapedDistanceSum {
    pieces: Vec<Piece>,
    common_points: Vec<Vec<f64>>,
    dim: usize,
}

impl StarShapedDistanceSum {
    pub fn new(pieces: Vec<Piece>, common_points: Vec<Vec<f64>>) -> Result<Self> {
        let Some(anchor) = common_points.first() else {
            return Err(Error::invalid("common_points", "at least one common point is required"));
        };
        let dim = anchor.len();
        if dim == 0 {
            return Err(Error::invalid("common_points", "points must be non-empty"));
        }
        if pieces.is_empty() {
            return Err(Error::invalid("pieces", "at least one piece is required"));
        }
        for p in &common_points {
            if p.len() != dim {
                return Err(Error::invalid("common_points", "points differ in dimension"));
            }
            check_finite(p, "common point")?;
        }
        let mut total = 0.0;
        for (i, piece) in pieces.iter().enumerate() {
            if !(piece.weight.is_finite() && piece.weight >= 0.0) {
                return Err(Error::invalid("weight", format!("piece {i} has a negative weight")));
            }
            total += piece.weight;
            if piece.members.is_empty() {
                return Err(Error::invalid("members", format!("piece {i} has no members")));
            }
            for (j, m) in piece.members.iter().enumerate() {
                if m.dim() != dim {
                    return Err(Error::invalid(
                        "members",
                        format!("piece {i} member {j} has dimension {}, expected {dim}", m.dim()),
                    ));
                }
                if let Some(k) = common_points.iter().position(|c| !m.contains(c, MEMBERSHIP_TOL)) {
                    return Err(Error::invalid(
                        "common_points",
                        format!("common point {k} is outside piece {i} member {j}"),
                    ));
                }
            }
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::invalid("weight", format!("weights sum to {total}, not 1")));
        }
        Ok(Self {
            pieces,
            common_points,
            dim,
        })
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn common_points(&self) -> &[Vec<f64>] {
        &self.common_points
    }
}

impl Objective for StarShapedDistanceSum {
    fn name(&self) -> &'static str {
        "star_distance"
    }

    fn dim(&self) -> Option<usize> {
        Some(self.dim)
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        self.check_input(x)?;
        let mut f = 0.0;
        for p in &self.pieces {
            f += p.weight * distance_squared(&p.members, x)?.0;
        }
        Ok(f)
    }

    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_input(x)?;
        let mut g = vec![0.0; self.dim];
        for p in &self.pieces {
            let (_, near) = distance_squared(&p.members, x)?;
            for ((gi, xi), ni) in g.iter_mut().zip(x).zip(&near) {
                *gi += 2.0 * p.weight * (xi - ni);
            }
        }
        Ok(g)
    }

    fn minimizer(&self) -> Option<Vec<f64>> {
        self.common_points.first().cloned()
    }
}
