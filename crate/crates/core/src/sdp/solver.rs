//! First-order splitting for [`SdpProblem`].
//!
//! The iteration alternates a projection onto the affine set `{x : Ax = b}`
//! with a projection onto the product of PSD cones. The affine projection uses
//! a pseudo-inverse of `AAᵀ`, factored once per connected group of rows, so
//! changing the penalty parameter never triggers a refactorization.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;

use super::cone::{project_psd_in_place, smat, svec_len};
use super::problem::{BlockId, ConstraintId, SdpProblem};
use crate::qcore::ComplexMatrix;

/// Above this many variables the cone projections are spread over threads.
const PARALLEL_VARS: usize = 16_384;
const PINV_RTOL: f64 = 1e-12;
const INFEASIBLE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub feas_tol: f64,
    pub gap_tol: f64,
    pub max_iterations: usize,
    /// Initial penalty parameter.
    pub rho: f64,
    /// Over-relaxation factor in `(0, 2)`.
    pub relaxation: f64,
    /// Residuals are evaluated every this many iterations.
    pub check_every: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            feas_tol: 1e-8,
            gap_tol: 1e-7,
            max_iterations: 200_000,
            rho: 1.0,
            relaxation: 1.0,
            check_every: 10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum SolveStatus {
    Converged,
    MaxIterations,
    Infeasible,
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub primal_value: f64,
    pub dual_value: f64,
    /// `|primal_value − dual_value|`.
    pub gap: f64,
    pub iterations: usize,
    pub status: SolveStatus,
    /// `‖Az − b‖ / (1 + ‖b‖)`.
    pub primal_residual: f64,
    /// `‖c − Aᵀy − s‖ / (1 + ‖c‖)`.
    pub dual_residual: f64,
    pub primal_blocks: Vec<ComplexMatrix>,
    pub dual_slack_blocks: Vec<ComplexMatrix>,
    pub multipliers: Vec<f64>,
}

impl SdpSolution {
    pub fn primal_block(&self, block: BlockId) -> &ComplexMatrix {
        &self.primal_blocks[block.index()]
    }

    pub fn dual_slack(&self, block: BlockId) -> &ComplexMatrix {
        &self.dual_slack_blocks[block.index()]
    }

    /// Multiplier of a matrix constraint as a Hermitian matrix, so that its
    /// contribution to the dual objective is `Re Tr[Y · rhs]`.
    pub fn dual_matrix(&self, con: &ConstraintId) -> Option<ComplexMatrix> {
        con.matrix_dim().map(|m| smat(&self.multipliers[con.rows()], m))
    }

    pub fn dual_scalar(&self, con: &ConstraintId) -> f64 {
        self.multipliers[con.rows().start]
    }
}

/// Dense pseudo-inverse of `A_c A_cᵀ` for one connected group of rows.
struct Component {
    rows: Vec<usize>,
    pinv: DMatrix<f64>,
}

struct AffineProjector<'a> {
    rows: &'a [Vec<(usize, f64)>],
    rhs: &'a [f64],
    components: Vec<Component>,
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

impl<'a> AffineProjector<'a> {
    fn new(problem: &'a SdpProblem) -> Self {
        let rows = problem.rows();
        let n_rows = rows.len();
        let mut parent: Vec<usize> = (0..n_rows).collect();
        let mut owner = vec![usize::MAX; problem.n_vars()];
        for (r, row) in rows.iter().enumerate() {
            for &(col, _) in row {
                if owner[col] == usize::MAX {
                    owner[col] = r;
                } else {
                    let (a, b) = (find(&mut parent, owner[col]), find(&mut parent, r));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
        let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for r in 0..n_rows {
            let root = find(&mut parent, r);
            groups.entry(root).or_default().push(r);
        }
        let components = groups.into_values().map(|g| Self::factor(rows, g)).collect();
        Self {
            rows,
            rhs: problem.rhs(),
            components,
        }
    }

    fn factor(rows: &[Vec<(usize, f64)>], group: Vec<usize>) -> Component {
        let k = group.len();
        let mut by_col: std::collections::BTreeMap<usize, Vec<(usize, f64)>> = Default::default();
        for (local, &r) in group.iter().enumerate() {
            for &(col, v) in &rows[r] {
                by_col.entry(col).or_default().push((local, v));
            }
        }
        let mut gram = DMatrix::<f64>::zeros(k, k);
        for entries in by_col.values() {
            for &(i, vi) in entries {
                for &(j, vj) in entries {
                    gram[(i, j)] += vi * vj;
                }
            }
        }
        let eig = SymmetricEigen::new(gram);
        let top = eig.eigenvalues.iter().fold(0.0_f64, |m, &l| m.max(l.abs()));
        let cut = top * PINV_RTOL * k as f64;
        let mut pinv = DMatrix::<f64>::zeros(k, k);
        for (idx, &l) in eig.eigenvalues.iter().enumerate() {
            if l > cut {
                let col = eig.eigenvectors.column(idx);
                pinv.ger(1.0 / l, &col, &col, 1.0);
            }
        }
        Component { rows: group, pinv }
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        for (o, row) in out.iter_mut().zip(self.rows) {
            *o = row.iter().map(|&(c, v)| v * x[c]).sum();
        }
    }

    fn apply_transpose_add(&self, w: &[f64], scale: f64, out: &mut [f64]) {
        for (row, &wr) in self.rows.iter().zip(w) {
            if wr != 0.0 {
                for &(c, v) in row {
                    out[c] += scale * v * wr;
                }
            }
        }
    }

    /// Projects `v` onto `{Ax = b}` in place and returns `w` with `x = v − Aᵀw`.
    fn project(&self, v: &mut [f64], w: &mut [f64]) {
        let mut r = vec![0.0; self.rows.len()];
        self.apply(v, &mut r);
        for (ri, bi) in r.iter_mut().zip(self.rhs) {
            *ri -= bi;
        }
        for comp in &self.components {
            let local = DVector::from_iterator(comp.rows.len(), comp.rows.iter().map(|&i| r[i]));
            let sol = &comp.pinv * local;
            for (&i, s) in comp.rows.iter().zip(sol.iter()) {
                w[i] = *s;
            }
        }
        self.apply_transpose_add(w, -1.0, v);
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

struct Cone {
    dims: Vec<usize>,
    parallel: bool,
}

impl Cone {
    fn project(&self, v: &mut [f64]) {
        let mut chunks = Vec::with_capacity(self.dims.len());
        let mut rest = v;
        for &m in &self.dims {
            let (head, tail) = rest.split_at_mut(svec_len(m));
            chunks.push((head, m));
            rest = tail;
        }
        if self.parallel {
            chunks.into_par_iter().for_each(|(c, m)| project_psd_in_place(c, m));
        } else {
            for (c, m) in chunks {
                project_psd_in_place(c, m);
            }
        }
    }
}

/// Solves `min cᵀx + offset` subject to `Ax = b` and every block PSD.
pub fn solve(problem: &SdpProblem, options: &SolverOptions) -> SdpSolution {
    let n = problem.n_vars();
    let m = problem.n_rows();
    let c = problem.objective();
    let b = problem.rhs();
    let cone = Cone {
        dims: problem.block_dims().to_vec(),
        parallel: n >= PARALLEL_VARS,
    };
    let proj = AffineProjector::new(problem);
    let b_norm = norm(b);
    let c_norm = norm(c);

    let mut z = vec![0.0; n];
    let mut u = vec![0.0; n];
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; m];
    let mut ax = vec![0.0; m];

    // Consistency of the affine set: project the origin and check the result.
    proj.project(&mut x, &mut w);
    proj.apply(&x, &mut ax);
    let inconsistency = ax.iter().zip(b).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt() / (1.0 + b_norm);
    if inconsistency > INFEASIBLE_TOL {
        return finish(problem, &x, &vec![0.0; n], &vec![0.0; m], 0, SolveStatus::Infeasible, inconsistency, f64::INFINITY);
    }

    let alpha = options.relaxation;
    let mut rho = options.rho;
    let check = options.check_every.max(1);
    let mut y = vec![0.0; m];
    let mut s = vec![0.0; n];
    let mut resid = vec![0.0; n];
    let mut status = SolveStatus::MaxIterations;
    let mut iterations = 0;
    let (mut pres, mut dres) = (f64::INFINITY, f64::INFINITY);

    for k in 1..=options.max_iterations {
        iterations = k;
        for i in 0..n {
            x[i] = z[i] - u[i] - c[i] / rho;
        }
        proj.project(&mut x, &mut w);
        for i in 0..n {
            let xh = alpha * x[i] + (1.0 - alpha) * z[i];
            z[i] = xh + u[i];
            u[i] = z[i];
        }
        cone.project(&mut z);
        for i in 0..n {
            u[i] -= z[i];
        }

        if k % check != 0 && k != options.max_iterations {
            continue;
        }
        for (yi, wi) in y.iter_mut().zip(&w) {
            *yi = -rho * wi;
        }
        for (si, ui) in s.iter_mut().zip(&u) {
            *si = -rho * ui;
        }
        proj.apply(&z, &mut ax);
        pres = ax.iter().zip(b).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt() / (1.0 + b_norm);
        for i in 0..n {
            resid[i] = c[i] - s[i];
        }
        proj.apply_transpose_add(&y, -1.0, &mut resid);
        dres = norm(&resid) / (1.0 + c_norm);
        let gap = (dot(c, &z) - dot(b, &y)).abs();
        if pres <= options.feas_tol && dres <= options.feas_tol && gap <= options.gap_tol {
            status = SolveStatus::Converged;
            break;
        }
        if k % (5 * check) == 0 {
            let ratio = (pres / dres.max(1e-300)).sqrt();
            if !(0.2..=5.0).contains(&ratio) {
                let f = ratio.clamp(0.1, 10.0);
                rho *= f;
                for ui in u.iter_mut() {
                    *ui /= f;
                }
            }
        }
    }
    finish(problem, &z, &s, &y, iterations, status, pres, dres)
}

#[allow(clippy::too_many_arguments)]
fn finish(
    problem: &SdpProblem,
    z: &[f64],
    s: &[f64],
    y: &[f64],
    iterations: usize,
    status: SolveStatus,
    primal_residual: f64,
    dual_residual: f64,
) -> SdpSolution {
    let offset = problem.objective_offset();
    let primal_value = dot(problem.objective(), z) + offset;
    let dual_value = dot(problem.rhs(), y) + offset;
    let blocks = |v: &[f64]| {
        problem
            .block_dims()
            .iter()
            .zip(problem.offsets())
            .map(|(&m, &o)| smat(&v[o..o + svec_len(m)], m))
            .collect::<Vec<_>>()
    };
    SdpSolution {
        primal_value,
        dual_value,
        gap: (primal_value - dual_value).abs(),
        iterations,
        status,
        primal_residual,
        dual_residual,
        primal_blocks: blocks(z),
        dual_slack_blocks: blocks(s),
        multipliers: y.to_vec(),
    }
}
