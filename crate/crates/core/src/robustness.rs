//! Closed-form side of the certification: the steering functional and its
//! normalisation, the robustness lower bound, the δ certificate and the
//! isotropic-state thresholds.
//!
//! For a two-setting assemblage produced by a state of Schmidt number `n`,
//! `SR ≤ (√n − 1)/(√n + 1)`, equivalently `n ≥ δ = ((1 + SR)/(1 − SR))²`.
//! Any dual-feasible functional `F` gives `SR ≥ Σ Tr[F σ] − 1`; the functional
//! `F_{a|x} = A_{a|x}ᵀ / λ` only needs the diagonal coincidences.

use serde::Serialize;

use crate::assemblage::{enumerate_strategies, Assemblage, SteeringSetting, INPUTS};
use crate::error::{Error, Result};
use crate::expdata::CorrelatorTable;
use crate::qcore::{self, ComplexMatrix, DensityMatrix, HERMITIAN_TOL};

/// Allowed excess of `max_μ ‖Σ D_μ F‖` over 1 for a functional to count as feasible.
pub const FEASIBILITY_TOL: f64 = 1e-9;
/// Guard subtracted before taking the ceiling of δ, so that exact integers
/// certify themselves.
pub const CEIL_GUARD: f64 = 1e-9;

/// Positive operators `F_{a|x}` with `‖F_{a₁|1} + F_{a₂|2}‖_∞ ≤ 1` for every
/// deterministic strategy.
#[derive(Debug, Clone, PartialEq)]
pub struct SteeringFunctional {
    operators: [Vec<ComplexMatrix>; INPUTS],
    lambda: f64,
}

impl SteeringFunctional {
    /// Validates positivity and dual feasibility at [`FEASIBILITY_TOL`].
    pub fn new(operators: [Vec<ComplexMatrix>; INPUTS], lambda: f64) -> Result<Self> {
        Self::with_tolerance(operators, lambda, HERMITIAN_TOL, FEASIBILITY_TOL)
    }

    pub(crate) fn with_tolerance(
        operators: [Vec<ComplexMatrix>; INPUTS],
        lambda: f64,
        psd_tol: f64,
        feas_tol: f64,
    ) -> Result<Self> {
        let outcomes = operators[0].len();
        if outcomes == 0 || operators[1].len() != outcomes {
            return Err(Error::shape("functional needs the same positive outcome count on both inputs"));
        }
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::domain(format!("normalisation {lambda} must be positive")));
        }
        let dim = operators[0][0].nrows();
        for (x, row) in operators.iter().enumerate() {
            for (a, f) in row.iter().enumerate() {
                if f.nrows() != dim || f.ncols() != dim {
                    return Err(Error::shape(format!("F[{a}|{x}] is not {dim}x{dim}")));
                }
                if !qcore::all_finite(f) || !qcore::is_psd(f, psd_tol) {
                    return Err(Error::CertificateInvalid(format!("F[{a}|{x}] is not PSD")));
                }
            }
        }
        let functional = SteeringFunctional { operators, lambda };
        let worst = functional.feasibility_residual();
        if worst > 1.0 + feas_tol {
            return Err(Error::CertificateInvalid(format!(
                "max over strategies of ‖Σ D F‖ is {worst}, exceeds 1"
            )));
        }
        Ok(functional)
    }

    pub fn dim(&self) -> usize {
        self.operators[0][0].nrows()
    }

    pub fn outcomes(&self) -> usize {
        self.operators[0].len()
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn operator(&self, x: usize, a: usize) -> &ComplexMatrix {
        &self.operators[x][a]
    }

    pub fn operators(&self) -> &[Vec<ComplexMatrix>; INPUTS] {
        &self.operators
    }

    /// `max_μ ‖Σ_{a,x} D_μ(a|x) F_{a|x}‖_∞`.
    pub fn feasibility_residual(&self) -> f64 {
        max_strategy_norm(&self.operators)
    }

    /// `Σ_{a,x} Tr[F_{a|x} σ_{a|x}]`.
    pub fn evaluate(&self, sigma: &Assemblage) -> Result<f64> {
        if sigma.dim() != self.dim() || sigma.outcomes() != self.outcomes() {
            return Err(Error::shape(format!(
                "functional on dim {} with {} outcomes cannot evaluate an assemblage of dim {} with {}",
                self.dim(),
                self.outcomes(),
                sigma.dim(),
                sigma.outcomes()
            )));
        }
        let mut total = 0.0;
        for x in 0..INPUTS {
            for a in 0..self.outcomes() {
                total += qcore::trace_product(&self.operators[x][a], sigma.state(x, a));
            }
        }
        Ok(total)
    }
}

fn max_strategy_norm(operators: &[Vec<ComplexMatrix>; INPUTS]) -> f64 {
    let outcomes = operators[0].len();
    enumerate_strategies(outcomes)
        .into_iter()
        .map(|s| {
            let sum = &operators[0][s.output(0)] + &operators[1][s.output(1)];
            qcore::spectral_norm(&sum).unwrap_or(f64::INFINITY)
        })
        .fold(0.0, f64::max)
}

/// `max_μ ‖A_{a₁|1} + A_{a₂|2}‖_∞` over all strategies.
pub fn lambda_general(setting: &SteeringSetting) -> f64 {
    let ops = [
        setting.measurement(0).operators().to_vec(),
        setting.measurement(1).operators().to_vec(),
    ];
    max_strategy_norm(&ops)
}

/// `1 + 1/√d`, the normalisation for a pair of mutually unbiased bases.
pub fn lambda_mub(d: usize) -> Result<f64> {
    if d < 2 {
        return Err(Error::domain(format!("dimension {d} must be at least 2")));
    }
    Ok(1.0 + 1.0 / (d as f64).sqrt())
}

/// `F_{a|x} = A_{a|x}ᵀ / λ` with `λ = lambda_general(setting)`.
pub fn build_functional(setting: &SteeringSetting) -> Result<SteeringFunctional> {
    let lambda = lambda_general(setting);
    if !(lambda > 0.0) {
        return Err(Error::domain("measurement pair has zero normalisation"));
    }
    let operators = std::array::from_fn(|x| {
        setting
            .measurement(x)
            .operators()
            .iter()
            .map(|a| a.transpose().unscale(lambda))
            .collect()
    });
    SteeringFunctional::new(operators, lambda)
}

/// What the steering functional is evaluated on.
#[derive(Debug, Clone, Copy)]
pub enum Counterpart<'a> {
    /// `Σ_{a,x} Tr[(A_{a|x} ⊗ A_{a|x}ᵀ) ρ]`.
    State(&'a DensityMatrix, &'a SteeringSetting),
    /// `Σ_{a,x} Tr[A_{a|x}ᵀ σ_{a|x}]`, i.e. `λ · Σ Tr[F σ]`.
    Assemblage(&'a Assemblage, &'a SteeringSetting),
    /// `Σ_x Σ_a p(a,a|x)` over the bases in the table.
    Correlators(&'a CorrelatorTable),
}

/// The left-hand side of the two-setting steering inequality before division by λ.
pub fn functional_value(counterpart: Counterpart<'_>) -> Result<f64> {
    match counterpart {
        Counterpart::State(rho, setting) => {
            let d = setting.dim();
            if rho.dim() != d * d {
                return Err(Error::shape(format!(
                    "state of dim {} does not match a {d}x{d} bipartition",
                    rho.dim()
                )));
            }
            let m = rho.matrix();
            let mut total = 0.0;
            for meas in setting.measurements() {
                for op in meas.operators() {
                    // Tr[(A ⊗ Aᵀ) ρ] = Σ A_{ij} A_{lk} ρ_{(j,l),(i,k)}
                    for i in 0..d {
                        for j in 0..d {
                            let aij = op[(i, j)];
                            for k in 0..d {
                                for l in 0..d {
                                    total += (aij * op[(l, k)] * m[(j * d + l, i * d + k)]).re;
                                }
                            }
                        }
                    }
                }
            }
            Ok(total)
        }
        Counterpart::Assemblage(sigma, setting) => {
            if sigma.dim() != setting.dim() || sigma.outcomes() != setting.outcomes() {
                return Err(Error::shape("assemblage and setting differ in shape"));
            }
            let mut total = 0.0;
            for x in 0..INPUTS {
                for (a, op) in setting.measurement(x).operators().iter().enumerate() {
                    total += qcore::trace_product(&op.transpose(), sigma.state(x, a));
                }
            }
            Ok(total)
        }
        Counterpart::Correlators(table) => Ok(table.diagonal_sum()),
    }
}

/// `functional_value / λ − 1`, without clamping.
pub fn raw_dual_value(functional_value: f64, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::domain(format!("normalisation {lambda} must be positive")));
    }
    Ok(functional_value / lambda - 1.0)
}

/// Lower bound on the steering robustness; negative dual values certify nothing
/// and are clamped to 0.
pub fn sr_lower_bound(functional_value: f64, lambda: f64) -> Result<f64> {
    Ok(raw_dual_value(functional_value, lambda)?.max(0.0))
}

/// `δ = ((1 + sr)/(1 − sr))²`.
pub fn delta(sr: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&sr) {
        return Err(Error::domain(format!("robustness {sr} outside [0, 1)")));
    }
    let r = (1.0 + sr) / (1.0 - sr);
    Ok(r * r)
}

/// `(√n − 1)/(√n + 1)`, the largest robustness reachable with Schmidt number `n`.
pub fn sr_ceiling(n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("Schmidt number must be at least 1"));
    }
    let s = (n as f64).sqrt();
    Ok((s - 1.0) / (s + 1.0))
}

/// `ceil(δ − 1e-9)`, at least 1.
pub fn certified_schmidt(delta: f64) -> Result<u32> {
    if !(delta >= 1.0) || !delta.is_finite() {
        return Err(Error::domain(format!("δ = {delta} must be a finite number ≥ 1")));
    }
    Ok(((delta - CEIL_GUARD).ceil() as u32).max(1))
}

/// Visibility above which an isotropic state measured in two MUBs violates the
/// Schmidt-number-`n` bound: `((d + √d − 1)√n − 1) / ((d − 1)(√n + 1))`.
pub fn critical_visibility(d: u64, n: u64) -> Result<f64> {
    if d < 2 {
        return Err(Error::domain(format!("dimension {d} must be at least 2")));
    }
    if n == 0 || n > d {
        return Err(Error::domain(format!("n = {n} must lie in 1..={d}")));
    }
    let (df, sn) = (d as f64, (n as f64).sqrt());
    Ok(((df + df.sqrt() - 1.0) * sn - 1.0) / ((df - 1.0) * (sn + 1.0)))
}

/// Point certificate derived from a functional value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Certificate {
    pub functional_value: f64,
    pub lambda: f64,
    pub raw_dual_value: f64,
    pub sr_lower_bound: f64,
    pub delta: f64,
    pub certified_schmidt: u32,
}

impl Certificate {
    pub fn from_functional_value(functional_value: f64, lambda: f64) -> Result<Self> {
        let raw = raw_dual_value(functional_value, lambda)?;
        let sr = raw.max(0.0);
        let delta = delta(sr)?;
        Ok(Certificate {
            functional_value,
            lambda,
            raw_dual_value: raw,
            sr_lower_bound: sr,
            delta,
            certified_schmidt: certified_schmidt(delta)?,
        })
    }
}
