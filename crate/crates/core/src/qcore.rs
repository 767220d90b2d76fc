//! Dense complex linear algebra and the state objects built on it.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::C64;

pub mod random;

/// Dense complex matrix, row/column indexed as usual.
pub type ComplexMatrix = DMatrix<C64>;

/// Tolerance for Hermiticity, positivity and trace checks.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Default threshold on Schmidt coefficients when counting the rank.
pub const RANK_TOL: f64 = 1e-8;

const KET_NORM_TOL: f64 = 1e-10;

pub fn identity(dim: usize) -> ComplexMatrix {
    ComplexMatrix::identity(dim, dim)
}

/// Kronecker product; the indices of `a` are outermost.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Traces out the first tensor factor of an operator on `C^dim_a ⊗ C^dim_b`.
pub fn partial_trace_a(m: &ComplexMatrix, dim_a: usize, dim_b: usize) -> Result<ComplexMatrix> {
    let n = dim_a * dim_b;
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::shape(format!(
            "partial trace over {dim_a}x{dim_b} expects a {n}x{n} operator, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let mut out = ComplexMatrix::zeros(dim_b, dim_b);
    for j in 0..dim_a {
        let base = j * dim_b;
        for k in 0..dim_b {
            for l in 0..dim_b {
                out[(k, l)] += m[(base + k, base + l)];
            }
        }
    }
    Ok(out)
}

/// Traces out the second tensor factor.
pub fn partial_trace_b(m: &ComplexMatrix, dim_a: usize, dim_b: usize) -> Result<ComplexMatrix> {
    let n = dim_a * dim_b;
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::shape(format!(
            "partial trace over {dim_a}x{dim_b} expects a {n}x{n} operator, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let mut out = ComplexMatrix::zeros(dim_a, dim_a);
    for i in 0..dim_a {
        for j in 0..dim_a {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..dim_b {
                acc += m[(i * dim_b + k, j * dim_b + k)];
            }
            out[(i, j)] = acc;
        }
    }
    Ok(out)
}

/// Entrywise maximum of `|M - M†|`.
pub fn hermiticity_defect(m: &ComplexMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn is_hermitian(m: &ComplexMatrix, tol: f64) -> bool {
    hermiticity_defect(m) <= tol
}

pub fn all_finite(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// `(M + M†) / 2`.
pub fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
///
/// Only the lower triangle is read, so callers should symmetrise first if the
/// input carries rounding noise above the diagonal.
pub fn hermitian_eigen(m: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let eig = SymmetricEigen::new(m.clone());
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    let mut values: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    values
}

/// Smallest eigenvalue of the Hermitian part of `m`.
pub fn min_eigenvalue(m: &ComplexMatrix) -> f64 {
    hermitian_eigenvalues(&hermitian_part(m))
        .first()
        .copied()
        .unwrap_or(0.0)
}

pub fn max_eigenvalue(m: &ComplexMatrix) -> f64 {
    hermitian_eigenvalues(&hermitian_part(m))
        .last()
        .copied()
        .unwrap_or(0.0)
}

/// Hermitian within `tol` and no eigenvalue below `-tol`.
pub fn is_psd(m: &ComplexMatrix, tol: f64) -> bool {
    m.is_square() && is_hermitian(m, tol) && min_eigenvalue(m) >= -tol
}

/// Projection onto the PSD cone in Frobenius norm.
pub fn psd_part(m: &ComplexMatrix) -> ComplexMatrix {
    let (values, vectors) = hermitian_eigen(&hermitian_part(m));
    let n = m.nrows();
    let mut out = ComplexMatrix::zeros(n, n);
    for (i, &v) in values.iter().enumerate() {
        if v > 0.0 {
            let col = vectors.column(i);
            out += (col * col.adjoint()).scale(v);
        }
    }
    out
}

/// Largest singular value.
pub fn spectral_norm(m: &ComplexMatrix) -> Result<f64> {
    if !m.is_square() {
        return Err(Error::shape(format!(
            "spectral norm expects a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.nrows() == 0 {
        return Ok(0.0);
    }
    Ok(m.singular_values().max())
}

/// `Re Tr[A B]`.
pub fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    // Tr[AB] = Σ_ij A_ij B_ji
    let n = a.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..a.ncols() {
            acc += (a[(i, j)] * b[(j, i)]).re;
        }
    }
    acc
}

pub fn trace(m: &ComplexMatrix) -> C64 {
    m.trace()
}

/// Entrywise max of `|a - b|`, infinite on shape mismatch.
pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// A unit vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    amplitudes: DVector<C64>,
}

impl Ket {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        Self::from_vector(DVector::from_vec(amplitudes))
    }

    pub fn from_vector(amplitudes: DVector<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::domain("ket must have positive dimension"));
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::domain("ket amplitudes must be finite"));
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > KET_NORM_TOL {
            return Err(Error::domain(format!("ket norm {norm} differs from 1")));
        }
        Ok(Ket { amplitudes })
    }

    /// Normalises `v`; fails on the zero vector.
    pub fn normalized(v: DVector<C64>) -> Result<Self> {
        let norm = v.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::domain("cannot normalise a zero or non-finite vector"));
        }
        Self::from_vector(v.unscale(norm))
    }

    /// Computational basis vector `|j⟩`.
    pub fn basis(dim: usize, j: usize) -> Result<Self> {
        if j >= dim {
            return Err(Error::domain(format!("basis index {j} out of range for dim {dim}")));
        }
        let mut v = DVector::zeros(dim);
        v[j] = C64::new(1.0, 0.0);
        Ok(Ket { amplitudes: v })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Ket) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    pub fn projector(&self) -> ComplexMatrix {
        &self.amplitudes * self.amplitudes.adjoint()
    }

    pub fn tensor(&self, other: &Ket) -> Ket {
        Ket {
            amplitudes: self.amplitudes.kronecker(&other.amplitudes),
        }
    }

    pub fn conj(&self) -> Ket {
        Ket {
            amplitudes: self.amplitudes.map(|z| z.conj()),
        }
    }
}

/// `Σ_j |j,j⟩ / √d`.
pub fn max_entangled(d: usize) -> Result<Ket> {
    if d < 2 {
        return Err(Error::domain(format!("maximally entangled state needs d >= 2, got {d}")));
    }
    let amp = C64::new(1.0 / (d as f64).sqrt(), 0.0);
    let mut v = DVector::zeros(d * d);
    for j in 0..d {
        v[j * d + j] = amp;
    }
    Ok(Ket { amplitudes: v })
}

/// A Hermitian positive semidefinite operator, optionally of unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    normalised: bool,
}

impl DensityMatrix {
    /// Validates a unit-trace state.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let tr = matrix.trace();
        Self::check_positive(&matrix)?;
        if (tr.re - 1.0).abs() > HERMITIAN_TOL || tr.im.abs() > HERMITIAN_TOL {
            return Err(Error::consistency(format!("trace {tr} differs from 1")));
        }
        Ok(DensityMatrix {
            matrix,
            normalised: true,
        })
    }

    /// Validates a PSD operator without any trace condition.
    pub fn unnormalised(matrix: ComplexMatrix) -> Result<Self> {
        Self::check_positive(&matrix)?;
        Ok(DensityMatrix {
            matrix,
            normalised: false,
        })
    }

    fn check_positive(matrix: &ComplexMatrix) -> Result<()> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::shape(format!(
                "density matrix must be square and non-empty, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if !all_finite(matrix) {
            return Err(Error::consistency("density matrix has non-finite entries"));
        }
        let defect = hermiticity_defect(matrix);
        if defect > HERMITIAN_TOL {
            return Err(Error::consistency(format!("not Hermitian (defect {defect:e})")));
        }
        let min = min_eigenvalue(matrix);
        if min < -HERMITIAN_TOL {
            return Err(Error::consistency(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    pub(crate) fn from_parts(matrix: ComplexMatrix, normalised: bool) -> Self {
        DensityMatrix { matrix, normalised }
    }

    pub fn pure(psi: &Ket) -> Self {
        DensityMatrix {
            matrix: psi.projector(),
            normalised: true,
        }
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::domain("dimension must be positive"));
        }
        Ok(DensityMatrix {
            matrix: identity(dim).unscale(dim as f64),
            normalised: true,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn is_normalised(&self) -> bool {
        self.normalised
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    /// `p·self + (1-p)·other`.
    pub fn mix(&self, other: &DensityMatrix, p: f64) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::shape("cannot mix states of different dimension"));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::domain(format!("mixing weight {p} outside [0,1]")));
        }
        Ok(DensityMatrix {
            matrix: self.matrix.scale(p) + other.matrix.scale(1.0 - p),
            normalised: self.normalised && other.normalised,
        })
    }
}

/// `v |φ_d⟩⟨φ_d| + (1 - v) 1/d²`.
pub fn isotropic_state(d: usize, v: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::domain(format!("visibility {v} outside [0,1]")));
    }
    let phi = max_entangled(d)?;
    let n = d * d;
    let matrix = phi.projector().scale(v) + identity(n).scale((1.0 - v) / n as f64);
    Ok(DensityMatrix {
        matrix,
        normalised: true,
    })
}

#[derive(Debug, Clone)]
pub struct SchmidtData {
    /// Non-increasing.
    pub coefficients: Vec<f64>,
    pub left_basis: Vec<Ket>,
    pub right_basis: Vec<Ket>,
    pub rank: usize,
}

/// Schmidt decomposition `|ψ⟩ = Σ_i s_i |u_i⟩|v_i⟩`.
pub fn schmidt(psi: &Ket, dim_a: usize, dim_b: usize, tol: f64) -> Result<SchmidtData> {
    if psi.dim() != dim_a * dim_b {
        return Err(Error::shape(format!(
            "ket of dim {} does not factor as {dim_a}x{dim_b}",
            psi.dim()
        )));
    }
    let amps = psi.amplitudes();
    let coeffs = ComplexMatrix::from_fn(dim_a, dim_b, |j, k| amps[j * dim_b + k]);
    let svd = coeffs.svd(true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V^T");
    let k = svd.singular_values.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));

    let mut coefficients = Vec::with_capacity(k);
    let mut left_basis = Vec::with_capacity(k);
    let mut right_basis = Vec::with_capacity(k);
    for &i in &order {
        coefficients.push(svd.singular_values[i]);
        left_basis.push(Ket::normalized(u.column(i).into_owned())?);
        right_basis.push(Ket::normalized(v_t.row(i).transpose())?);
    }
    let rank = coefficients.iter().filter(|&&s| s > tol).count();
    Ok(SchmidtData {
        coefficients,
        left_basis,
        right_basis,
        rank,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn diag(values: &[f64]) -> ComplexMatrix {
        ComplexMatrix::from_diagonal(&DVector::from_iterator(values.len(), values.iter().map(|&v| c(v))))
    }

    #[test]
    fn tensor_identities_and_projectors() {
        assert_eq!(tensor(&identity(2), &identity(2)), identity(4));
        assert_eq!(tensor(&diag(&[1.0, 0.0]), &diag(&[0.0, 1.0])), diag(&[0.0, 1.0, 0.0, 0.0]));
    }

    #[test]
    fn tensor_bit_flips_map_00_to_11() {
        let x = ComplexMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]);
        let xx = tensor(&x, &x);
        let zero_zero = Ket::basis(4, 0).unwrap();
        let out = &xx * zero_zero.amplitudes();
        assert_eq!(out, Ket::basis(4, 3).unwrap().amplitudes().clone());
    }

    #[test]
    fn partial_trace_of_products_and_bell_state() {
        let a = diag(&[0.25, 0.75]);
        let b = ComplexMatrix::from_row_slice(2, 2, &[c(0.5), C64::new(0.1, 0.2), C64::new(0.1, -0.2), c(0.5)]);
        let got = partial_trace_a(&tensor(&a, &b), 2, 2).unwrap();
        assert!(max_abs_diff(&got, &b) < 1e-15);

        let phi = max_entangled(2).unwrap();
        let marg = partial_trace_a(&phi.projector(), 2, 2).unwrap();
        assert!(max_abs_diff(&marg, &identity(2).scale(0.5)) < 1e-15);
    }

    #[test]
    fn partial_trace_rejects_bad_shapes() {
        assert!(matches!(partial_trace_a(&identity(5), 2, 2), Err(Error::Shape(_))));
    }

    #[test]
    fn partial_trace_preserves_trace_of_random_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let h = random::hermitian(9, &mut rng);
            let t = partial_trace_a(&h, 3, 3).unwrap();
            assert!((t.trace() - h.trace()).norm() < 1e-12);
        }
    }

    #[test]
    fn partial_trace_recovers_scaled_b_factor() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for (da, db) in [(2, 3), (3, 2), (4, 4)] {
            let a = random::hermitian(da, &mut rng);
            let b = random::hermitian(db, &mut rng);
            let got = partial_trace_a(&tensor(&a, &b), da, db).unwrap();
            assert!(max_abs_diff(&got, &(b.clone() * a.trace())) < 1e-12);
            let got_b = partial_trace_b(&tensor(&a, &b), da, db).unwrap();
            assert!(max_abs_diff(&got_b, &(a.clone() * b.trace())) < 1e-12);
        }
    }

    #[test]
    fn max_entangled_layout() {
        let phi = max_entangled(2).unwrap();
        let s = 1.0 / 2f64.sqrt();
        assert_eq!(phi.amplitudes().as_slice(), &[c(s), c(0.0), c(0.0), c(s)]);
        assert!(matches!(max_entangled(1), Err(Error::Domain(_))));
        let phi5 = max_entangled(5).unwrap();
        assert_eq!(schmidt(&phi5, 5, 5, RANK_TOL).unwrap().rank, 5);
        for d in [2, 3, 7] {
            let marg = partial_trace_a(&max_entangled(d).unwrap().projector(), d, d).unwrap();
            assert!(max_abs_diff(&marg, &identity(d).unscale(d as f64)) < 1e-15);
        }
    }

    #[test]
    fn isotropic_limits_and_spectrum() {
        let noise = isotropic_state(3, 0.0).unwrap();
        assert!(max_abs_diff(noise.matrix(), &identity(9).unscale(9.0)) < 1e-15);
        let pure = isotropic_state(3, 1.0).unwrap();
        assert!(max_abs_diff(pure.matrix(), &max_entangled(3).unwrap().projector()) < 1e-15);

        let half = isotropic_state(2, 0.5).unwrap();
        let ev = half.eigenvalues();
        let expected = [0.125, 0.125, 0.125, 0.625];
        for (got, want) in ev.iter().zip(expected) {
            assert!((got - want).abs() < 1e-12, "{ev:?}");
        }
        assert!(matches!(isotropic_state(3, 1.5), Err(Error::Domain(_))));
        assert!(matches!(isotropic_state(3, -0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn schmidt_examples() {
        let prod = Ket::basis(4, 0).unwrap();
        assert_eq!(schmidt(&prod, 2, 2, RANK_TOL).unwrap().rank, 1);

        let phi = max_entangled(4).unwrap();
        let s = schmidt(&phi, 4, 4, RANK_TOL).unwrap();
        assert_eq!(s.rank, 4);
        assert!(s.coefficients.iter().all(|&x| (x - 0.5).abs() < 1e-12));

        let r5 = 5f64.sqrt();
        let psi = Ket::new(vec![c(2.0 / r5), c(0.0), c(0.0), c(1.0 / r5)]).unwrap();
        let s = schmidt(&psi, 2, 2, RANK_TOL).unwrap();
        assert_eq!(s.rank, 2);
        assert!((s.coefficients[0] - 2.0 / r5).abs() < 1e-12);
        assert!((s.coefficients[1] - 1.0 / r5).abs() < 1e-12);

        assert!(matches!(schmidt(&psi, 3, 2, RANK_TOL), Err(Error::Shape(_))));
    }

    #[test]
    fn schmidt_reconstructs_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let psi = random::ket(12, &mut rng);
        let s = schmidt(&psi, 3, 4, RANK_TOL).unwrap();
        let mut rebuilt = DVector::<C64>::zeros(12);
        for i in 0..s.coefficients.len() {
            rebuilt += s.left_basis[i].tensor(&s.right_basis[i]).amplitudes().scale(s.coefficients[i]);
        }
        assert!((rebuilt - psi.amplitudes()).norm() < 1e-12);
    }

    #[test]
    fn spectral_norm_examples() {
        assert!((spectral_norm(&identity(4)).unwrap() - 1.0).abs() < 1e-14);
        let p = Ket::basis(3, 1).unwrap().projector();
        assert!((spectral_norm(&p).unwrap() - 1.0).abs() < 1e-14);
        // |⟨p|q⟩| = c ⇒ ‖P + Q‖ = 1 + c
        let theta: f64 = 0.7;
        let q = Ket::new(vec![c(theta.cos()), c(theta.sin())]).unwrap();
        let p = Ket::basis(2, 0).unwrap();
        let norm = spectral_norm(&(p.projector() + q.projector())).unwrap();
        assert!((norm - (1.0 + theta.cos())).abs() < 1e-12);
        let rect = ComplexMatrix::zeros(2, 3);
        assert!(matches!(spectral_norm(&rect), Err(Error::Shape(_))));
    }

    #[test]
    fn hermitian_eigen_reconstruction_up_to_dim_62() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [1, 2, 5, 17, 31, 62] {
            let m = random::hermitian(n, &mut rng);
            let (values, u) = hermitian_eigen(&m);
            let lambda = ComplexMatrix::from_diagonal(&DVector::from_iterator(n, values.iter().map(|&v| c(v))));
            let rebuilt = &u * lambda * u.adjoint();
            assert!(max_abs_diff(&rebuilt, &m) < 1e-10, "n={n}");
            assert!(values.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn density_matrix_validation() {
        assert!(DensityMatrix::new(identity(2).scale(0.5)).is_ok());
        assert!(matches!(DensityMatrix::new(identity(2)), Err(Error::Consistency(_))));
        assert!(DensityMatrix::unnormalised(identity(2)).is_ok());
        assert!(matches!(DensityMatrix::new(diag(&[1.5, -0.5])), Err(Error::Consistency(_))));
        let mut nonherm = identity(2).scale(0.5);
        nonherm[(0, 1)] = c(0.1);
        assert!(matches!(DensityMatrix::new(nonherm), Err(Error::Consistency(_))));
    }

    #[test]
    fn psd_part_clips_negative_spectrum() {
        let m = diag(&[2.0, -1.0, 0.5]);
        let p = psd_part(&m);
        assert!(max_abs_diff(&p, &diag(&[2.0, 0.0, 0.5])) < 1e-14);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn schmidt_coefficients_sorted_and_normalised(seed in any::<u64>(), da in 1usize..5, db in 1usize..5) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let psi = random::ket(da * db, &mut rng);
                let s = schmidt(&psi, da, db, RANK_TOL).unwrap();
                prop_assert!(s.coefficients.windows(2).all(|w| w[0] >= w[1]));
                let total: f64 = s.coefficients.iter().map(|x| x * x).sum();
                prop_assert!((total - 1.0).abs() < 1e-10);
                prop_assert_eq!(s.rank, s.coefficients.iter().filter(|&&x| x > RANK_TOL).count());
            }
        }
    }
}
