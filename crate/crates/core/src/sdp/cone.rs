//! Coordinates for Hermitian blocks and projection onto the PSD cone.
//!
//! A Hermitian `m×m` block is stored as `m²` reals: the diagonal first, then
//! `√2·Re X_ij, √2·Im X_ij` for `i < j` in row-major order. The map is an
//! isometry, `⟨svec X, svec Y⟩ = Re Tr[X Y]`.

use std::f64::consts::SQRT_2;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::qcore::ComplexMatrix;
use crate::C64;

pub fn svec_len(m: usize) -> usize {
    m * m
}

/// Writes `svec(X)` into `out` (length `m²`); `X` is assumed Hermitian.
pub fn svec_into(x: &ComplexMatrix, out: &mut [f64]) {
    let m = x.nrows();
    debug_assert_eq!(out.len(), m * m);
    for i in 0..m {
        out[i] = x[(i, i)].re;
    }
    let mut k = m;
    for i in 0..m {
        for j in i + 1..m {
            let z = x[(i, j)];
            out[k] = SQRT_2 * z.re;
            out[k + 1] = SQRT_2 * z.im;
            k += 2;
        }
    }
}

pub fn svec(x: &ComplexMatrix) -> Vec<f64> {
    let mut out = vec![0.0; svec_len(x.nrows())];
    svec_into(x, &mut out);
    out
}

/// Inverse of [`svec`].
pub fn smat(v: &[f64], m: usize) -> ComplexMatrix {
    debug_assert_eq!(v.len(), m * m);
    let mut x = ComplexMatrix::zeros(m, m);
    for i in 0..m {
        x[(i, i)] = C64::new(v[i], 0.0);
    }
    let mut k = m;
    for i in 0..m {
        for j in i + 1..m {
            let z = C64::new(v[k], v[k + 1]) / SQRT_2;
            x[(i, j)] = z;
            x[(j, i)] = z.conj();
            k += 2;
        }
    }
    x
}

/// `[[Re X, −Im X], [Im X, Re X]]`.
pub fn real_embedding(x: &ComplexMatrix) -> DMatrix<f64> {
    let m = x.nrows();
    let mut e = DMatrix::zeros(2 * m, 2 * m);
    for i in 0..m {
        for j in 0..m {
            let z = x[(i, j)];
            e[(i, j)] = z.re;
            e[(i + m, j + m)] = z.re;
            e[(i + m, j)] = z.im;
            e[(i, j + m)] = -z.im;
        }
    }
    e
}

/// Reads a complex matrix back from its real embedding, averaging the two
/// copies of each part.
pub fn from_real_embedding(e: &DMatrix<f64>) -> ComplexMatrix {
    let m = e.nrows() / 2;
    ComplexMatrix::from_fn(m, m, |i, j| {
        C64::new(
            0.5 * (e[(i, j)] + e[(i + m, j + m)]),
            0.5 * (e[(i + m, j)] - e[(i, j + m)]),
        )
    })
}

/// Euclidean projection of an svec block onto the PSD cone, in place.
pub fn project_psd_in_place(v: &mut [f64], m: usize) {
    if m == 1 {
        v[0] = v[0].max(0.0);
        return;
    }
    let e = real_embedding(&smat(v, m));
    let eig = SymmetricEigen::new(e);
    if eig.eigenvalues.iter().all(|&l| l >= 0.0) {
        return;
    }
    let n = 2 * m;
    let mut rebuilt = DMatrix::<f64>::zeros(n, n);
    for (k, &l) in eig.eigenvalues.iter().enumerate() {
        if l > 0.0 {
            let col = eig.eigenvectors.column(k);
            rebuilt.ger(l, &col, &col, 1.0);
        }
    }
    svec_into(&from_real_embedding(&rebuilt), v);
}

/// Smallest eigenvalue of the Hermitian block stored in `v`.
pub fn min_eigenvalue_svec(v: &[f64], m: usize) -> f64 {
    if m == 1 {
        return v[0];
    }
    crate::qcore::min_eigenvalue(&smat(v, m))
}
