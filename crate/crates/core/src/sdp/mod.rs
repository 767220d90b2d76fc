//! Semidefinite programs for the robustness quantifiers and the first-order
//! solver behind them.

pub mod cone;
pub mod problem;
mod programs;
pub mod solver;

pub use problem::{BlockId, ConstraintId, LinearMap, SdpProblem};
pub use programs::{
    consistent_steering_robustness, incompatibility_robustness, steering_robustness, verify_dual_certificate,
    RobustnessKind, RobustnessResult, CERTIFICATE_TOL, MAX_EXACT_DIM,
};
pub use solver::{solve, SdpSolution, SolveStatus, SolverOptions};
