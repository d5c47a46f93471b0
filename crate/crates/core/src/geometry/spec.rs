use serde::{Deserialize, Serialize};

use super::{BoxSet, FeasibleSet, L1Ball, L2Ball, ProbabilitySimplex, VertexPolytope};
use crate::error::Result;

/// JSON description of a feasible set, e.g. `{"type":"simplex","n":10}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum SetSpec {
    Simplex { n: usize },
    Box { lower: Vec<f64>, upper: Vec<f64> },
    L1 { radius: f64, center: Vec<f64> },
    L2 { radius: f64, center: Vec<f64> },
    Polytope { vertices: Vec<Vec<f64>> },
}

impl SetSpec {
    pub fn build(&self) -> Result<Box<dyn FeasibleSet>> {
        Ok(match self {
            SetSpec::Simplex { n } => Box::new(ProbabilitySimplex::new(*n)?),
            SetSpec::Box { lower, upper } => Box::new(BoxSet::new(lower.clone(), upper.clone())?),
            SetSpec::L1 { radius, center } => Box::new(L1Ball::new(*radius, center.clone())?),
            SetSpec::L2 { radius, center } => Box::new(L2Ball::new(*radius, center.clone())?),
            SetSpec::Polytope { vertices } => Box::new(VertexPolytope::new(vertices.clone())?),
        })
    }
}
