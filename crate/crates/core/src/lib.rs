//! Projection-free minimization over compact convex sets.
//!
//! The crate is organised around the Frank–Wolfe iteration
//! `x^{k+1} = x^k + λ_k (p(x^k) − x^k)` where `p(x)` minimizes the
//! linearization of the objective over the feasible set:
//!
//! * [`geometry`]: feasible sets with linear minimization oracles.
//! * [`objectives`]: convex and star-convex test objectives.
//! * [`stepsizes`]: Armijo, Lipschitz-estimating, known-L and `2/(k+2)` rules.
//! * [`solver`]: the main loop, its trace and the bound constants of a run.
//! * [`verify`]: star-convexity checkers and complexity-bound audits.
//! * [`problem`]: JSON problem descriptions tying the pieces together.

pub mod error;
pub mod geometry;
pub mod linalg;
pub mod objectives;
pub mod problem;
pub mod solver;
pub mod stepsizes;
pub mod verify;

pub use error::{Error, Result};
pub use geometry::{FeasibleSet, SetSpec};
pub use objectives::{Objective, ObjectiveSpec};
pub use problem::{Problem, ProblemSpec};
pub use solver::{solve, RunReport, SolverConfig, Termination};
pub use stepsizes::StrategyKind;
