//! Complete sets of mutually unbiased bases in odd prime dimensions.
//!
//! Besides the computational basis, basis `x ∈ {0,…,d-1}` has vectors
//! `|e_a^x⟩ = Σ_l ω^{a·l + x·l²} |l⟩ / √d` with `ω = exp(2πi/d)`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::Ket;
use crate::C64;

/// Orthonormality / unbiasedness tolerance for constructed bases.
pub const MUB_TOL: f64 = 1e-12;

/// `c` for the computational basis, otherwise the integer index `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BasisLabel {
    Computational,
    Index(usize),
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisLabel::Computational => f.write_str("c"),
            BasisLabel::Index(x) => write!(f, "{x}"),
        }
    }
}

impl FromStr for BasisLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "c" {
            return Ok(BasisLabel::Computational);
        }
        s.parse::<usize>()
            .map(BasisLabel::Index)
            .map_err(|_| Error::data(format!("invalid basis label {s:?}; expected `c` or an integer")))
    }
}

impl Serialize for BasisLabel {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BasisLabel {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// An orthonormal basis of `C^dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    dim: usize,
    label: BasisLabel,
    vectors: Vec<Ket>,
}

impl Basis {
    /// Checks that `vectors` are `dim` pairwise orthonormal kets.
    pub fn new(label: BasisLabel, vectors: Vec<Ket>) -> Result<Self> {
        let dim = vectors.len();
        if dim == 0 {
            return Err(Error::domain("a basis needs at least one vector"));
        }
        if let Some(v) = vectors.iter().find(|v| v.dim() != dim) {
            return Err(Error::shape(format!(
                "basis of {dim} vectors contains a vector of dim {}",
                v.dim()
            )));
        }
        let basis = Basis { dim, label, vectors };
        let defect = basis.orthonormality_defect();
        if defect > MUB_TOL {
            return Err(Error::consistency(format!(
                "basis {label} is not orthonormal (defect {defect:e})"
            )));
        }
        Ok(basis)
    }

    pub fn computational(dim: usize) -> Result<Self> {
        let vectors = (0..dim).map(|j| Ket::basis(dim, j)).collect::<Result<_>>()?;
        Basis::new(BasisLabel::Computational, vectors)
    }

    /// Discrete Fourier basis; unbiased to the computational basis in any `dim`.
    pub fn fourier(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::domain("dimension must be positive"));
        }
        let vectors = (0..dim)
            .map(|a| Ket::from_vector(quadratic_phase_vector(dim, 0, a)))
            .collect::<Result<_>>()?;
        Basis::new(BasisLabel::Index(0), vectors)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> BasisLabel {
        self.label
    }

    pub fn vectors(&self) -> &[Ket] {
        &self.vectors
    }

    /// Max over pairs of `|⟨u_i|u_j⟩ - δ_ij|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, u) in self.vectors.iter().enumerate() {
            for (j, v) in self.vectors.iter().enumerate().skip(i) {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((u.inner(v) - C64::new(target, 0.0)).norm());
            }
        }
        worst
    }
}

/// Trial division; fine for the inputs used here (≤ 10⁶).
pub fn is_prime(d: u64) -> bool {
    if d < 2 {
        return false;
    }
    if d < 4 {
        return true;
    }
    if d.is_multiple_of(2) {
        return false;
    }
    let mut k = 3;
    while k * k <= d {
        if d.is_multiple_of(k) {
            return false;
        }
        k += 2;
    }
    true
}

fn require_odd_prime(d: usize) -> Result<()> {
    if d == 2 || !is_prime(d as u64) {
        return Err(Error::domain(format!(
            "MUB construction requires an odd prime dimension, got {d}"
        )));
    }
    Ok(())
}

fn quadratic_phase_vector(d: usize, x: usize, a: usize) -> DVector<C64> {
    let dm = d as u64;
    let (x, a) = (x as u64 % dm, a as u64 % dm);
    let amp = 1.0 / (d as f64).sqrt();
    DVector::from_fn(d, |l, _| {
        let l = l as u64;
        let e = (a * l + x * ((l * l) % dm)) % dm;
        C64::from_polar(amp, 2.0 * PI * e as f64 / d as f64)
    })
}

/// `|e_a^x⟩` in odd prime dimension `d`. Both indices are taken modulo `d`.
pub fn mub_vector(d: usize, x: usize, a: usize) -> Result<Ket> {
    require_odd_prime(d)?;
    Ket::from_vector(quadratic_phase_vector(d, x, a))
}

/// Basis `x` of the set (not the computational one).
pub fn mub_basis(d: usize, x: usize) -> Result<Basis> {
    require_odd_prime(d)?;
    if x >= d {
        return Err(Error::domain(format!("basis index {x} out of range for d = {d}")));
    }
    let vectors = (0..d).map(|a| mub_vector(d, x, a)).collect::<Result<_>>()?;
    Basis::new(BasisLabel::Index(x), vectors)
}

/// Looks up a basis of the complete set by label.
pub fn basis_by_label(d: usize, label: BasisLabel) -> Result<Basis> {
    match label {
        BasisLabel::Computational => {
            require_odd_prime(d)?;
            Basis::computational(d)
        }
        BasisLabel::Index(x) => mub_basis(d, x),
    }
}

/// `true` iff `max_{u,v} | |⟨u|v⟩|² - 1/d | ≤ tol`.
pub fn check_unbiased(b1: &Basis, b2: &Basis, tol: f64) -> Result<bool> {
    Ok(unbiasedness_defect(b1, b2)? <= tol)
}

pub fn unbiasedness_defect(b1: &Basis, b2: &Basis) -> Result<f64> {
    if b1.dim() != b2.dim() {
        return Err(Error::shape(format!(
            "bases of dims {} and {} cannot be compared",
            b1.dim(),
            b2.dim()
        )));
    }
    let target = 1.0 / b1.dim() as f64;
    let mut worst = 0.0f64;
    for u in b1.vectors() {
        for v in b2.vectors() {
            worst = worst.max((u.inner(v).norm_sqr() - target).abs());
        }
    }
    Ok(worst)
}

/// The `d + 1` mutually unbiased bases, computational first.
#[derive(Debug, Clone, PartialEq)]
pub struct MubSet {
    dim: usize,
    bases: Vec<Basis>,
}

impl MubSet {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bases(&self) -> &[Basis] {
        &self.bases
    }

    pub fn basis(&self, label: BasisLabel) -> Option<&Basis> {
        self.bases.iter().find(|b| b.label() == label)
    }

    /// Worst pairwise defect over all distinct pairs.
    pub fn max_unbiasedness_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, b1) in self.bases.iter().enumerate() {
            for b2 in &self.bases[i + 1..] {
                // dims agree by construction
                worst = worst.max(unbiasedness_defect(b1, b2).unwrap_or(f64::INFINITY));
            }
        }
        worst
    }

    pub fn to_json(&self) -> String {
        let doc = MubSetJson {
            d: self.dim,
            bases: self
                .bases
                .iter()
                .map(|b| BasisJson {
                    label: b.label().to_string(),
                    vectors: b
                        .vectors()
                        .iter()
                        .map(|v| v.amplitudes().iter().map(|z| [z.re, z.im]).collect())
                        .collect(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("MUB JSON serialisation cannot fail")
    }

    /// Parses and re-validates a set written by [`MubSet::to_json`].
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: MubSetJson =
            serde_json::from_str(text).map_err(|e| Error::data(format!("invalid MUB JSON: {e}")))?;
        let d = doc.d;
        if d == 0 || d > 4096 {
            return Err(Error::data(format!("unsupported dimension {d}")));
        }
        let mut bases = Vec::with_capacity(doc.bases.len());
        for b in doc.bases {
            let label: BasisLabel = b.label.parse()?;
            if b.vectors.len() != d {
                return Err(Error::data(format!(
                    "basis {label} has {} vectors, expected {d}",
                    b.vectors.len()
                )));
            }
            let mut kets = Vec::with_capacity(d);
            for v in b.vectors {
                if v.len() != d {
                    return Err(Error::data(format!(
                        "basis {label} has a vector of length {}, expected {d}",
                        v.len()
                    )));
                }
                let amps = v.into_iter().map(|[re, im]| C64::new(re, im)).collect();
                kets.push(Ket::new(amps).map_err(|e| Error::data(format!("basis {label}: {e}")))?);
            }
            bases.push(Basis::new(label, kets).map_err(|e| Error::data(e.to_string()))?);
        }
        for (i, b) in bases.iter().enumerate() {
            if bases[..i].iter().any(|p| p.label() == b.label()) {
                return Err(Error::data(format!("duplicate basis label {}", b.label())));
            }
        }
        let set = MubSet { dim: d, bases };
        let defect = set.max_unbiasedness_defect();
        if defect > MUB_TOL {
            return Err(Error::data(format!("bases are not mutually unbiased (defect {defect:e})")));
        }
        Ok(set)
    }
}

pub fn mub_set(d: usize) -> Result<MubSet> {
    require_odd_prime(d)?;
    let mut bases = Vec::with_capacity(d + 1);
    bases.push(Basis::computational(d)?);
    for x in 0..d {
        bases.push(mub_basis(d, x)?);
    }
    Ok(MubSet { dim: d, bases })
}

#[derive(Serialize, Deserialize)]
struct MubSetJson {
    d: usize,
    bases: Vec<BasisJson>,
}

#[derive(Serialize, Deserialize)]
struct BasisJson {
    label: String,
    vectors: Vec<Vec<[f64; 2]>>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality() {
        assert!(is_prime(31));
        assert!(is_prime(29));
        assert!(is_prime(2));
        assert!(!is_prime(1));
        assert!(!is_prime(0));
        assert!(!is_prime(9));
        assert!(!is_prime(961));
        assert!(is_prime(999_983));
    }

    #[test]
    fn flat_vector_for_x0_a0() {
        let v = mub_vector(3, 0, 0).unwrap();
        let s = 1.0 / 3f64.sqrt();
        for z in v.amplitudes().iter() {
            assert!((z - C64::new(s, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn quadratic_phases_in_dim_3() {
        // l² mod 3 = (0, 1, 1)
        let v = mub_vector(3, 1, 0).unwrap();
        let s = 1.0 / 3f64.sqrt();
        let omega = C64::from_polar(1.0, 2.0 * PI / 3.0);
        let expected = [C64::new(1.0, 0.0), omega, omega];
        for (z, w) in v.amplitudes().iter().zip(expected) {
            assert!((z - w * s).norm() < 1e-15);
        }
    }

    #[test]
    fn overlap_between_bases_in_dim_5() {
        let u = mub_vector(5, 2, 3).unwrap();
        let v = mub_vector(5, 4, 1).unwrap();
        assert!((u.inner(&v).norm_sqr() - 0.2).abs() < 1e-12);
    }

    #[test]
    fn even_and_composite_dimensions_rejected() {
        assert!(matches!(mub_vector(2, 0, 0), Err(Error::Domain(_))));
        assert!(matches!(mub_set(6), Err(Error::Domain(_))));
        assert!(matches!(mub_set(9), Err(Error::Domain(_))));
        assert!(matches!(mub_set(1), Err(Error::Domain(_))));
    }

    #[test]
    fn set_sizes() {
        let s5 = mub_set(5).unwrap();
        assert_eq!(s5.bases().len(), 6);
        let pairs = s5.bases().len() * (s5.bases().len() - 1) / 2;
        assert_eq!(pairs, 15);
        assert_eq!(mub_set(31).unwrap().bases().len(), 32);
        assert_eq!(s5.bases()[0].label(), BasisLabel::Computational);
    }

    #[test]
    fn all_pairs_unbiased_in_dim_7() {
        let s = mub_set(7).unwrap();
        let mut count = 0;
        for (i, b1) in s.bases().iter().enumerate() {
            for b2 in &s.bases()[i + 1..] {
                assert!(check_unbiased(b1, b2, MUB_TOL).unwrap());
                count += 1;
            }
        }
        assert_eq!(count, 28);
    }

    #[test]
    fn check_unbiased_examples() {
        let c5 = Basis::computational(5).unwrap();
        let b0 = mub_basis(5, 0).unwrap();
        assert!(check_unbiased(&c5, &b0, MUB_TOL).unwrap());
        assert!(!check_unbiased(&b0, &b0, MUB_TOL).unwrap());
        assert!(!check_unbiased(&c5, &c5, MUB_TOL).unwrap());
        let b1 = mub_basis(7, 1).unwrap();
        let b4 = mub_basis(7, 4).unwrap();
        assert!(check_unbiased(&b1, &b4, MUB_TOL).unwrap());
        assert!(matches!(check_unbiased(&c5, &b1, MUB_TOL), Err(Error::Shape(_))));
    }

    #[test]
    fn qubit_pair_is_supplied_explicitly() {
        let c = Basis::computational(2).unwrap();
        let f = Basis::fourier(2).unwrap();
        assert!(check_unbiased(&c, &f, MUB_TOL).unwrap());
    }

    #[test]
    fn basis_rejects_non_orthonormal_vectors() {
        let v = Ket::basis(2, 0).unwrap();
        assert!(matches!(
            Basis::new(BasisLabel::Index(0), vec![v.clone(), v]),
            Err(Error::Consistency(_))
        ));
    }

    #[test]
    fn labels_round_trip_and_order() {
        assert_eq!("c".parse::<BasisLabel>().unwrap(), BasisLabel::Computational);
        assert_eq!(" 12 ".parse::<BasisLabel>().unwrap(), BasisLabel::Index(12));
        assert!("x".parse::<BasisLabel>().is_err());
        assert!(BasisLabel::Computational < BasisLabel::Index(0));
        assert_eq!(BasisLabel::Index(3).to_string(), "3");
    }

    #[test]
    fn json_round_trip_revalidates() {
        let s = mub_set(5).unwrap();
        let back = MubSet::from_json(&s.to_json()).unwrap();
        assert_eq!(back.bases().len(), 6);
        assert!(back.max_unbiasedness_defect() <= MUB_TOL);
        let broken = s.to_json().replacen("\"label\": \"0\"", "\"label\": \"c\"", 1);
        assert!(MubSet::from_json(&broken).is_err());
        assert!(MubSet::from_json("{\"d\": 3, \"bases\": [{\"label\": \"c\", \"vectors\": []}]}").is_err());
        assert!(MubSet::from_json("not json").is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn phases_are_periodic(di in 0usize..5, x in 0usize..31, a in 0usize..31) {
                let d = [3usize, 5, 7, 11, 31][di];
                let (x, a) = (x % d, a % d);
                let v = mub_vector(d, x, a).unwrap();
                let w = mub_vector(d, x + d, a + d).unwrap();
                for (p, q) in v.amplitudes().iter().zip(w.amplitudes().iter()) {
                    prop_assert!((p - q).norm() <= 1e-15);
                }
            }
        }
    }
}
