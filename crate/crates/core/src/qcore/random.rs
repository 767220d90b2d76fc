//! Seeded random states, operators and measurements for simulation and tests.

use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{hermitian_eigen, hermitian_part, ComplexMatrix, Ket};
use crate::error::{Error, Result};
use crate::C64;

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Random Hermitian matrix with Gaussian entries.
pub fn hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    hermitian_part(&ginibre(n, n, rng))
}

/// Haar-random unit vector.
pub fn ket<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Ket {
    loop {
        let v = DVector::from_fn(n, |_, _| gaussian(rng));
        if let Ok(k) = Ket::normalized(v) {
            return k;
        }
    }
}

/// Haar-random unitary (QR of a Ginibre matrix with phase correction).
pub fn unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let qr = ginibre(n, n, rng).qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Random full-rank density matrix (Ginibre ensemble).
pub fn density_matrix<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let g = ginibre(n, n, rng);
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    hermitian_part(&m.unscale(tr))
}

/// Random PSD matrix of the given rank, unit trace.
pub fn psd_of_rank<R: Rng + ?Sized>(n: usize, rank: usize, rng: &mut R) -> ComplexMatrix {
    let g = ginibre(n, rank.max(1), rng);
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    hermitian_part(&m.unscale(tr))
}

/// Random POVM with `outcomes` elements on `C^dim`: `A_a = S^{-1/2} G_a S^{-1/2}`
/// with `S = Σ_a G_a`.
pub fn povm<R: Rng + ?Sized>(dim: usize, outcomes: usize, rng: &mut R) -> Vec<ComplexMatrix> {
    let elements: Vec<ComplexMatrix> = (0..outcomes).map(|_| psd_of_rank(dim, dim, rng)).collect();
    let total = elements.iter().fold(ComplexMatrix::zeros(dim, dim), |acc, g| acc + g);
    let (values, vectors) = hermitian_eigen(&total);
    let inv_sqrt = DVector::from_iterator(dim, values.iter().map(|&v| C64::new(1.0 / v.sqrt(), 0.0)));
    let s = &vectors * ComplexMatrix::from_diagonal(&inv_sqrt) * vectors.adjoint();
    elements.iter().map(|g| hermitian_part(&(&s * g * &s))).collect()
}

/// Pure state on `C^d ⊗ C^d` with Schmidt rank exactly `rank`, random local
/// bases and random positive Schmidt coefficients.
pub fn pure_state_of_schmidt_rank<R: Rng + ?Sized>(d: usize, rank: usize, rng: &mut R) -> Result<Ket> {
    if rank == 0 || rank > d {
        return Err(Error::domain(format!("Schmidt rank {rank} must lie in 1..={d}")));
    }
    let ua = unitary(d, rng);
    let ub = unitary(d, rng);
    let coeffs: Vec<f64> = (0..rank).map(|_| 0.2 + rng.random::<f64>()).collect();
    let mut v = DVector::<C64>::zeros(d * d);
    for (k, &ck) in coeffs.iter().enumerate() {
        let a = ua.column(k).into_owned();
        let b = ub.column(k).into_owned();
        v += a.kronecker(&b).scale(ck);
    }
    Ket::normalized(v)
}
