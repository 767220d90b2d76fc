//! Standard-form semidefinite programs over Hermitian blocks.
//!
//! ```text
//! minimise   Σ_k Re Tr[C_k X_k] + offset
//! subject to linear equalities on the blocks,  X_k ⪰ 0
//! ```
//!
//! PSD inequalities are turned into equalities with a fresh slack block.

use std::collections::BTreeMap;
use std::ops::Range;

use super::cone::{svec, svec_len};
use crate::error::{Error, Result};
use crate::qcore::{self, ComplexMatrix, HERMITIAN_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BlockId(pub(crate) usize);

impl BlockId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// A group of equality rows. Matrix constraints carry the dimension of their
/// right-hand side so that the multiplier can be read back as a matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintId {
    pub(crate) rows: Range<usize>,
    pub(crate) dim: Option<usize>,
}

impl ConstraintId {
    pub fn rows(&self) -> Range<usize> {
        self.rows.clone()
    }

    pub fn matrix_dim(&self) -> Option<usize> {
        self.dim
    }
}

/// Linear map applied to one block inside a matrix constraint.
#[derive(Debug, Clone)]
pub enum LinearMap {
    /// `X ↦ c·X`
    Scale(f64),
    /// `X ↦ Tr[X]·M`
    TraceTimes(ComplexMatrix),
}

#[derive(Debug, Clone, Default)]
pub struct SdpProblem {
    block_dims: Vec<usize>,
    offsets: Vec<usize>,
    n_vars: usize,
    objective: Vec<f64>,
    objective_offset: f64,
    rows: Vec<Vec<(usize, f64)>>,
    rhs: Vec<f64>,
}

impl SdpProblem {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a Hermitian PSD variable of size `dim` (`dim = 1` is a non-negative scalar).
    pub fn add_block(&mut self, dim: usize) -> BlockId {
        assert!(dim > 0, "blocks must have positive dimension");
        let id = BlockId(self.block_dims.len());
        self.block_dims.push(dim);
        self.offsets.push(self.n_vars);
        self.n_vars += svec_len(dim);
        self.objective.resize(self.n_vars, 0.0);
        id
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.block_dims
    }

    pub fn block_range(&self, block: BlockId) -> Range<usize> {
        let start = self.offsets[block.0];
        start..start + svec_len(self.block_dims[block.0])
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    fn check_block(&self, block: BlockId) -> Result<usize> {
        self.block_dims
            .get(block.0)
            .copied()
            .ok_or_else(|| Error::shape(format!("unknown block {}", block.0)))
    }

    fn check_hermitian(m: &ComplexMatrix, what: &str) -> Result<()> {
        if !m.is_square() || !qcore::all_finite(m) || !qcore::is_hermitian(m, HERMITIAN_TOL) {
            return Err(Error::shape(format!("{what} must be a finite Hermitian matrix")));
        }
        Ok(())
    }

    /// Adds `Re Tr[C X_block]` to the objective.
    pub fn add_objective(&mut self, block: BlockId, c: &ComplexMatrix) -> Result<()> {
        let dim = self.check_block(block)?;
        if c.nrows() != dim {
            return Err(Error::shape(format!("objective term is {}x{}, block is {dim}x{dim}", c.nrows(), c.ncols())));
        }
        Self::check_hermitian(c, "objective coefficient")?;
        let range = self.block_range(block);
        for (dst, v) in self.objective[range].iter_mut().zip(svec(c)) {
            *dst += v;
        }
        Ok(())
    }

    /// Adds `coef · Tr[X_block]` to the objective.
    pub fn add_objective_trace(&mut self, block: BlockId, coef: f64) -> Result<()> {
        let dim = self.check_block(block)?;
        let start = self.offsets[block.0];
        for i in 0..dim {
            self.objective[start + i] += coef;
        }
        Ok(())
    }

    pub fn set_objective_offset(&mut self, offset: f64) {
        self.objective_offset = offset;
    }

    pub fn objective_offset(&self) -> f64 {
        self.objective_offset
    }

    /// `Σ_k L_k(X_k) = rhs` as a matrix identity.
    pub fn add_equality(&mut self, terms: &[(BlockId, LinearMap)], rhs: &ComplexMatrix) -> Result<ConstraintId> {
        Self::check_hermitian(rhs, "constraint right-hand side")?;
        let dim = rhs.nrows();
        let n = svec_len(dim);
        let mut rows: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); n];
        for (block, map) in terms {
            let bdim = self.check_block(*block)?;
            let start = self.offsets[block.0];
            match map {
                LinearMap::Scale(c) => {
                    if bdim != dim {
                        return Err(Error::shape(format!(
                            "block {} is {bdim}x{bdim} but the constraint is {dim}x{dim}",
                            block.0
                        )));
                    }
                    for (r, row) in rows.iter_mut().enumerate() {
                        *row.entry(start + r).or_insert(0.0) += c;
                    }
                }
                LinearMap::TraceTimes(m) => {
                    if m.nrows() != dim {
                        return Err(Error::shape("trace map output does not match the constraint"));
                    }
                    Self::check_hermitian(m, "trace map coefficient")?;
                    for (r, coef) in svec(m).into_iter().enumerate() {
                        if coef == 0.0 {
                            continue;
                        }
                        for i in 0..bdim {
                            *rows[r].entry(start + i).or_insert(0.0) += coef;
                        }
                    }
                }
            }
        }
        let first = self.rows.len();
        for row in rows {
            self.rows.push(row.into_iter().filter(|&(_, v)| v != 0.0).collect());
        }
        self.rhs.extend(svec(rhs));
        Ok(ConstraintId {
            rows: first..self.rows.len(),
            dim: Some(dim),
        })
    }

    /// `Σ_k L_k(X_k) ⪰ rhs`, via a new slack block `S` with `Σ_k L_k(X_k) − S = rhs`.
    pub fn add_psd_inequality(
        &mut self,
        terms: &[(BlockId, LinearMap)],
        rhs: &ComplexMatrix,
    ) -> Result<(ConstraintId, BlockId)> {
        let slack = self.add_block(rhs.nrows().max(1));
        let mut all = terms.to_vec();
        all.push((slack, LinearMap::Scale(-1.0)));
        Ok((self.add_equality(&all, rhs)?, slack))
    }

    /// `Σ_k Re Tr[A_k X_k] = rhs`.
    pub fn add_scalar_equality(&mut self, terms: &[(BlockId, ComplexMatrix)], rhs: f64) -> Result<ConstraintId> {
        if !rhs.is_finite() {
            return Err(Error::shape("right-hand side must be finite"));
        }
        let mut row = BTreeMap::new();
        for (block, a) in terms {
            let dim = self.check_block(*block)?;
            if a.nrows() != dim {
                return Err(Error::shape(format!("coefficient is {}x{}, block is {dim}x{dim}", a.nrows(), a.ncols())));
            }
            Self::check_hermitian(a, "constraint coefficient")?;
            let start = self.offsets[block.0];
            for (i, v) in svec(a).into_iter().enumerate() {
                *row.entry(start + i).or_insert(0.0) += v;
            }
        }
        self.rows.push(row.into_iter().filter(|&(_, v)| v != 0.0).collect());
        self.rhs.push(rhs);
        Ok(ConstraintId {
            rows: self.rows.len() - 1..self.rows.len(),
            dim: None,
        })
    }

    pub(crate) fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub(crate) fn rows(&self) -> &[Vec<(usize, f64)>] {
        &self.rows
    }

    pub(crate) fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub(crate) fn offsets(&self) -> &[usize] {
        &self.offsets
    }
}
