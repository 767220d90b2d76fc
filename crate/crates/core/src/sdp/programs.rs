//! Steering, consistent steering and incompatibility robustness as SDPs.
//!
//! ```text
//! SR(σ) = min Σ_μ Tr[π_μ] − 1   s.t.  Σ_μ D_μ(a|x) π_μ ⪰ σ_{a|x},  π_μ ⪰ 0
//! ```
//!
//! The dual multipliers of the matrix inequalities form a steering functional.
//! Raw solver output is repaired into a strictly feasible primal point and a
//! strictly feasible dual point, so the reported bounds bracket the true value
//! regardless of how far the iteration got.

use serde::Serialize;

use super::problem::{BlockId, ConstraintId, LinearMap, SdpProblem};
use super::solver::{solve, SdpSolution, SolverOptions};
use crate::assemblage::{enumerate_strategies, total_state, Assemblage, LhsModel, SteeringSetting, INPUTS};
use crate::error::{Error, Result};
use crate::qcore::{self, ComplexMatrix};
use crate::robustness::SteeringFunctional;
use crate::C64;

/// Largest Bob dimension accepted by the exact programs.
pub const MAX_EXACT_DIM: usize = 16;
/// Dual certificates may exceed the feasibility bound by at most this much.
pub const CERTIFICATE_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RobustnessKind {
    #[serde(rename = "sr")]
    Steering,
    #[serde(rename = "csr")]
    ConsistentSteering,
    #[serde(rename = "ir")]
    Incompatibility,
}

#[derive(Debug, Clone)]
pub struct RobustnessResult {
    pub kind: RobustnessKind,
    /// Upper bound from the primal witness; this is the reported robustness.
    pub value: f64,
    /// Lower bound from the dual witness.
    pub lower_bound: f64,
    /// Primal witness `π_μ / (1 + value)`.
    pub lhs_model: LhsModel,
    /// Dual witness; only the plain steering robustness has one of this form.
    pub functional: Option<SteeringFunctional>,
    pub solution: SdpSolution,
}

struct Program {
    problem: SdpProblem,
    pi: Vec<BlockId>,
    cells: [Vec<ConstraintId>; INPUTS],
}

fn guard(sigma: &Assemblage) -> Result<()> {
    if sigma.dim() > MAX_EXACT_DIM {
        return Err(Error::domain(format!(
            "exact robustness is limited to dimension {MAX_EXACT_DIM}, got {}",
            sigma.dim()
        )));
    }
    Ok(())
}

fn base_program(sigma: &Assemblage) -> Result<Program> {
    let d = sigma.dim();
    let k = sigma.outcomes();
    let strategies = enumerate_strategies(k);
    let mut problem = SdpProblem::new();
    let pi: Vec<BlockId> = strategies.iter().map(|_| problem.add_block(d)).collect();
    for &b in &pi {
        problem.add_objective_trace(b, 1.0)?;
    }
    problem.set_objective_offset(-1.0);
    let mut cells: [Vec<ConstraintId>; INPUTS] = Default::default();
    for (x, row) in cells.iter_mut().enumerate() {
        for a in 0..k {
            let terms: Vec<_> = strategies
                .iter()
                .zip(&pi)
                .filter(|(s, _)| s.output(x) == a)
                .map(|(_, &b)| (b, LinearMap::Scale(1.0)))
                .collect();
            let (con, _) = problem.add_psd_inequality(&terms, sigma.state(x, a))?;
            row.push(con);
        }
    }
    Ok(Program { problem, pi, cells })
}

/// Shifts every `π_μ` by a multiple of `shift` until all cell inequalities hold.
/// Each cell receives `outcomes` copies of the shift.
fn repair_primal(sigma: &Assemblage, mut pi: Vec<ComplexMatrix>, shift: &ComplexMatrix) -> Vec<ComplexMatrix> {
    let k = sigma.outcomes();
    let strategies = enumerate_strategies(k);
    for p in pi.iter_mut() {
        *p = qcore::psd_part(p);
    }
    let floor = qcore::min_eigenvalue(shift);
    let mut worst = 0.0f64;
    for x in 0..INPUTS {
        for a in 0..k {
            let mut cell = -sigma.state(x, a);
            for (s, p) in strategies.iter().zip(&pi) {
                if s.output(x) == a {
                    cell += p;
                }
            }
            worst = worst.max(-qcore::min_eigenvalue(&cell));
        }
    }
    if worst > 0.0 {
        let c = worst / (k as f64 * floor);
        for p in pi.iter_mut() {
            *p += shift * C64::new(c, 0.0);
        }
    }
    pi
}

fn lhs_from(pi: &[ComplexMatrix], value: f64, outcomes: usize) -> Result<LhsModel> {
    let scale = 1.0 / (1.0 + value);
    LhsModel::new(outcomes, pi.iter().map(|p| p * C64::new(scale, 0.0)).collect())
}

fn primal_value(pi: &[ComplexMatrix]) -> f64 {
    pi.iter().map(|p| qcore::trace(p).re).sum::<f64>() - 1.0
}

/// Exact steering robustness with certified upper and lower bounds.
pub fn steering_robustness(sigma: &Assemblage, options: &SolverOptions) -> Result<RobustnessResult> {
    guard(sigma)?;
    let d = sigma.dim();
    let k = sigma.outcomes();
    let program = base_program(sigma)?;
    let mut solution = solve(&program.problem, options);

    let raw_pi: Vec<_> = program.pi.iter().map(|&b| solution.primal_block(b).clone()).collect();
    let pi = repair_primal(sigma, raw_pi, &qcore::identity(d));
    let upper = primal_value(&pi);

    let operators: [Vec<ComplexMatrix>; INPUTS] = std::array::from_fn(|x| {
        program.cells[x]
            .iter()
            .map(|con| qcore::psd_part(&solution.dual_matrix(con).expect("matrix constraint")))
            .collect()
    });
    let (functional, lower) = dual_witness(operators, sigma)?;

    solution.primal_value = upper;
    solution.dual_value = lower;
    solution.gap = (upper - lower).abs();
    Ok(RobustnessResult {
        kind: RobustnessKind::Steering,
        value: upper,
        lower_bound: lower,
        lhs_model: lhs_from(&pi, upper, k)?,
        functional: Some(functional),
        solution,
    })
}

/// Rescales PSD operators into the dual feasible set and evaluates them.
fn dual_witness(mut operators: [Vec<ComplexMatrix>; INPUTS], sigma: &Assemblage) -> Result<(SteeringFunctional, f64)> {
    let norm = enumerate_strategies(sigma.outcomes())
        .into_iter()
        .map(|s| qcore::spectral_norm(&(&operators[0][s.output(0)] + &operators[1][s.output(1)])))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let scale = norm.max(1.0);
    for row in operators.iter_mut() {
        for f in row.iter_mut() {
            *f = f.unscale(scale);
        }
    }
    let functional = SteeringFunctional::new(operators, scale)?;
    let lower = functional.evaluate(sigma)? - 1.0;
    Ok((functional, lower))
}

/// Steering robustness against noise that shares the total state of `sigma`.
pub fn consistent_steering_robustness(sigma: &Assemblage, options: &SolverOptions) -> Result<RobustnessResult> {
    consistent(sigma, options, RobustnessKind::ConsistentSteering)
}

fn consistent(sigma: &Assemblage, options: &SolverOptions, kind: RobustnessKind) -> Result<RobustnessResult> {
    guard(sigma)?;
    let d = sigma.dim();
    let k = sigma.outcomes();
    let rho_b = total_state(sigma)?.into_matrix();
    let mut program = base_program(sigma)?;
    // Σ_μ π_μ − (Σ_μ Tr π_μ)·ρ_B = 0
    let mut terms = Vec::with_capacity(2 * program.pi.len());
    for &b in &program.pi {
        terms.push((b, LinearMap::Scale(1.0)));
        terms.push((b, LinearMap::TraceTimes(-&rho_b)));
    }
    program.problem.add_equality(&terms, &ComplexMatrix::zeros(d, d))?;
    let solution = solve(&program.problem, options);

    let pi: Vec<_> = program
        .pi
        .iter()
        .map(|&b| qcore::psd_part(solution.primal_block(b)))
        .collect();
    let value = primal_value(&pi);
    Ok(RobustnessResult {
        kind,
        value,
        lower_bound: solution.dual_value,
        lhs_model: lhs_from(&pi, value, k)?,
        functional: None,
        solution,
    })
}

/// Incompatibility robustness of a measurement pair, computed as the
/// consistent steering robustness of `{M_{a|x} / d}`.
pub fn incompatibility_robustness(setting: &SteeringSetting, options: &SolverOptions) -> Result<RobustnessResult> {
    let d = setting.dim();
    let states = std::array::from_fn(|x| {
        setting
            .measurement(x)
            .operators()
            .iter()
            .map(|m| m.unscale(d as f64))
            .collect()
    });
    let sigma = Assemblage::new(states)?;
    consistent(&sigma, options, RobustnessKind::Incompatibility)
}

/// `Σ Tr[F σ] − 1`, a lower bound on the steering robustness of `sigma`.
pub fn verify_dual_certificate(functional: &SteeringFunctional, sigma: &Assemblage) -> Result<f64> {
    let worst = functional.feasibility_residual();
    if worst > 1.0 + CERTIFICATE_TOL {
        return Err(Error::CertificateInvalid(format!("strategy norm {worst} exceeds 1")));
    }
    for x in 0..INPUTS {
        for a in 0..functional.outcomes() {
            if !qcore::is_psd(functional.operator(x, a), CERTIFICATE_TOL) {
                return Err(Error::CertificateInvalid(format!("F[{a}|{x}] is not PSD")));
            }
        }
    }
    Ok(functional.evaluate(sigma)? - 1.0)
}
