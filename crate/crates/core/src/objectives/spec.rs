use serde::{Deserialize, Serialize};

use super::{
    AbsExp1D, HomogeneousPower, Objective, Piece, Quadratic, QuarticCross, Shape,
    StarShapedDistanceSum,
};
use crate::error::{Error, Result};

/// JSON description of an objective, e.g. `{"type":"quartic_cross"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ObjectiveSpec {
    Quadratic {
        #[serde(rename = "Q")]
        q: Vec<Vec<f64>>,
        b: Vec<f64>,
        #[serde(default)]
        c: f64,
    },
    /// Shorthand for `½‖x − center‖²`.
    SquaredDistance { center: Vec<f64> },
    QuarticCross,
    Absexp,
    Pnorm { p: f64 },
    NormPower { r: f64 },
    StarDistance {
        pieces: Vec<PieceSpec>,
        common_points: Vec<Vec<f64>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceSpec {
    pub weight: f64,
    pub members: Vec<MemberSpec>,
}

/// A union member. The shape name is validated when the objective is built
/// so that unsupported shapes surface as a capability error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MemberSpec {
    pub shape: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<f64>>,
}

fn required<T: Clone>(field: &Option<T>, key: &str, shape: &str) -> Result<T> {
    field
        .clone()
        .ok_or_else(|| Error::invalid(key, format!("required for shape `{shape}`")))
}

impl MemberSpec {
    pub fn build(&self) -> Result<Shape> {
        let s = self.shape.as_str();
        let shape = match s {
            "box" => {
                let lower = required(&self.lower, "lower", s)?;
                let upper = required(&self.upper, "upper", s)?;
                if lower.len() != upper.len() || lower.iter().zip(&upper).any(|(l, u)| l > u) {
                    return Err(Error::invalid("lower", "box bounds are inconsistent"));
                }
                Shape::Box { lower, upper }
            }
            "ball" => {
                let radius = required(&self.radius, "radius", s)?;
                if !(radius >= 0.0) {
                    return Err(Error::invalid("radius", "must be nonnegative"));
                }
                Shape::Ball {
                    center: required(&self.center, "center", s)?,
                    radius,
                }
            }
            "segment" => {
                let a = required(&self.a, "a", s)?;
                let b = required(&self.b, "b", s)?;
                if a.len() != b.len() {
                    return Err(Error::invalid("b", "segment endpoints differ in dimension"));
                }
                Shape::Segment { a, b }
            }
            other => {
                return Err(Error::Unsupported(format!(
                    "union member shape `{other}` (expected box, ball or segment)"
                )))
            }
        };
        Ok(shape)
    }
}

impl ObjectiveSpec {
    pub fn build(&self) -> Result<Box<dyn Objective>> {
        Ok(match self {
            ObjectiveSpec::Quadratic { q, b, c } => Box::new(Quadratic::new(q.clone(), b.clone(), *c)?),
            ObjectiveSpec::SquaredDistance { center } => Box::new(Quadratic::squared_distance(center)?),
            ObjectiveSpec::QuarticCross => Box::new(QuarticCross),
            ObjectiveSpec::Absexp => Box::new(AbsExp1D),
            ObjectiveSpec::Pnorm { p } => Box::new(HomogeneousPower::pnorm(*p)?),
            ObjectiveSpec::NormPower { r } => Box::new(HomogeneousPower::norm_power(*r)?),
            ObjectiveSpec::StarDistance {
                pieces,
                common_points,
            } => {
                let pieces = pieces
                    .iter()
                    .map(|p| {
                        Ok(Piece {
                            weight: p.weight,
                            members: p.members.iter().map(MemberSpec::build).collect::<Result<_>>()?,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Box::new(StarShapedDistanceSum::new(pieces, common_points.clone())?)
            }
        })
    }
}
