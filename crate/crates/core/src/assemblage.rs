//! Two-setting assemblages and their local-hidden-state structure.
//!
//! Inputs are indexed `0` and `1` internally. The JSON form labels them `1`
//! and `2`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mub::Basis;
use crate::qcore::{self, ComplexMatrix, DensityMatrix, HERMITIAN_TOL};
use crate::C64;

/// Number of measurement settings. The certification bound only holds for pairs.
pub const INPUTS: usize = 2;
/// Tolerance on no-signalling and on the total trace.
pub const NO_SIGNALLING_TOL: f64 = 1e-9;
/// Positivity tolerance for LHS local states.
pub const LHS_PSD_TOL: f64 = 1e-9;

/// Largest local dimension accepted from serialized input.
const MAX_SERIALIZED_DIM: usize = 64;

/// A POVM: positive operators summing to the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    dim: usize,
    operators: Vec<ComplexMatrix>,
}

impl Measurement {
    pub fn new(operators: Vec<ComplexMatrix>) -> Result<Self> {
        let first = operators
            .first()
            .ok_or_else(|| Error::domain("a measurement needs at least one outcome"))?;
        let dim = first.nrows();
        let mut total = ComplexMatrix::zeros(dim, dim);
        for (a, op) in operators.iter().enumerate() {
            if op.nrows() != dim || op.ncols() != dim {
                return Err(Error::shape(format!("POVM element {a} is not {dim}x{dim}")));
            }
            if !qcore::all_finite(op) || !qcore::is_psd(op, HERMITIAN_TOL) {
                return Err(Error::consistency(format!("POVM element {a} is not Hermitian PSD")));
            }
            total += op;
        }
        let defect = qcore::max_abs_diff(&total, &qcore::identity(dim));
        if defect > HERMITIAN_TOL {
            return Err(Error::consistency(format!(
                "POVM elements sum to identity only within {defect:e}"
            )));
        }
        Ok(Measurement { dim, operators })
    }

    /// Rank-one projectors onto the basis vectors.
    pub fn from_basis(basis: &Basis) -> Self {
        Measurement {
            dim: basis.dim(),
            operators: basis.vectors().iter().map(|v| v.projector()).collect(),
        }
    }

    /// `A_a = 1/outcomes` for every outcome.
    pub fn trivial(dim: usize, outcomes: usize) -> Result<Self> {
        if dim == 0 || outcomes == 0 {
            return Err(Error::domain("dimension and outcome count must be positive"));
        }
        let op = qcore::identity(dim).unscale(outcomes as f64);
        Ok(Measurement {
            dim,
            operators: vec![op; outcomes],
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn outcomes(&self) -> usize {
        self.operators.len()
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn operator(&self, a: usize) -> &ComplexMatrix {
        &self.operators[a]
    }
}

/// Exactly two measurements of equal dimension and outcome count.
#[derive(Debug, Clone, PartialEq)]
pub struct SteeringSetting {
    measurements: [Measurement; INPUTS],
}

impl SteeringSetting {
    pub fn new(first: Measurement, second: Measurement) -> Result<Self> {
        if first.dim() != second.dim() || first.outcomes() != second.outcomes() {
            return Err(Error::shape(format!(
                "measurements differ in shape: dim {} / {}, outcomes {} / {}",
                first.dim(),
                second.dim(),
                first.outcomes(),
                second.outcomes()
            )));
        }
        Ok(SteeringSetting {
            measurements: [first, second],
        })
    }

    pub fn from_bases(first: &Basis, second: &Basis) -> Result<Self> {
        Self::new(Measurement::from_basis(first), Measurement::from_basis(second))
    }

    pub fn dim(&self) -> usize {
        self.measurements[0].dim()
    }

    pub fn outcomes(&self) -> usize {
        self.measurements[0].outcomes()
    }

    pub fn measurement(&self, x: usize) -> &Measurement {
        &self.measurements[x]
    }

    pub fn measurements(&self) -> &[Measurement; INPUTS] {
        &self.measurements
    }
}

/// The table `σ_{a|x}` of unnormalised conditional states.
#[derive(Debug, Clone, PartialEq)]
pub struct Assemblage {
    dim: usize,
    outcomes: usize,
    states: [Vec<ComplexMatrix>; INPUTS],
}

impl Assemblage {
    /// Validates positivity, no-signalling and unit total trace.
    pub fn new(states: [Vec<ComplexMatrix>; INPUTS]) -> Result<Self> {
        let outcomes = states[0].len();
        if outcomes == 0 || states[1].len() != outcomes {
            return Err(Error::shape(format!(
                "both inputs need the same positive number of outcomes, got {} and {}",
                states[0].len(),
                states[1].len()
            )));
        }
        let dim = states[0][0].nrows();
        if dim == 0 {
            return Err(Error::shape("assemblage states must be non-empty"));
        }
        for (x, row) in states.iter().enumerate() {
            for (a, s) in row.iter().enumerate() {
                if s.nrows() != dim || s.ncols() != dim {
                    return Err(Error::shape(format!("σ[{a}|{x}] is not {dim}x{dim}")));
                }
                if !qcore::all_finite(s) || !qcore::is_psd(s, HERMITIAN_TOL) {
                    return Err(Error::consistency(format!("σ[{a}|{x}] is not Hermitian PSD")));
                }
            }
        }
        let assemblage = Assemblage {
            dim,
            outcomes,
            states,
        };
        let residual = assemblage.no_signalling_residual();
        if residual > NO_SIGNALLING_TOL {
            return Err(Error::consistency(format!("no-signalling violated by {residual:e}")));
        }
        let tr = assemblage.marginal(0).trace();
        if (tr.re - 1.0).abs() > NO_SIGNALLING_TOL || tr.im.abs() > NO_SIGNALLING_TOL {
            return Err(Error::consistency(format!("total state has trace {tr}")));
        }
        Ok(assemblage)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn outcomes(&self) -> usize {
        self.outcomes
    }

    pub fn state(&self, x: usize, a: usize) -> &ComplexMatrix {
        &self.states[x][a]
    }

    pub fn states(&self) -> &[Vec<ComplexMatrix>; INPUTS] {
        &self.states
    }

    /// `Σ_a σ_{a|x}`.
    pub fn marginal(&self, x: usize) -> ComplexMatrix {
        self.states[x]
            .iter()
            .fold(ComplexMatrix::zeros(self.dim, self.dim), |acc, s| acc + s)
    }

    /// Entrywise max of `|Σ_a σ_{a|1} - Σ_a σ_{a|2}|`.
    pub fn no_signalling_residual(&self) -> f64 {
        qcore::max_abs_diff(&self.marginal(0), &self.marginal(1))
    }

    /// `p·self + (1-p)·other`, cell by cell.
    pub fn mix(&self, other: &Assemblage, p: f64) -> Result<Assemblage> {
        if self.dim != other.dim || self.outcomes != other.outcomes {
            return Err(Error::shape("cannot mix assemblages of different shape"));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::domain(format!("mixing weight {p} outside [0,1]")));
        }
        let states = std::array::from_fn(|x| {
            self.states[x]
                .iter()
                .zip(&other.states[x])
                .map(|(s, t)| s.scale(p) + t.scale(1.0 - p))
                .collect()
        });
        Assemblage::new(states)
    }

    /// `σ_{a|x} = 1 / (outcomes · dim)` for every cell.
    pub fn trivial(dim: usize, outcomes: usize) -> Result<Assemblage> {
        if dim == 0 || outcomes == 0 {
            return Err(Error::domain("dimension and outcome count must be positive"));
        }
        let s = qcore::identity(dim).unscale((dim * outcomes) as f64);
        Assemblage::new([vec![s.clone(); outcomes], vec![s; outcomes]])
    }

    pub fn to_json(&self) -> String {
        let mut sigma = BTreeMap::new();
        for (x, row) in self.states.iter().enumerate() {
            for (a, s) in row.iter().enumerate() {
                let mut flat = Vec::with_capacity(self.dim * self.dim);
                for i in 0..self.dim {
                    for j in 0..self.dim {
                        let z = s[(i, j)];
                        flat.push([z.re, z.im]);
                    }
                }
                sigma.insert(format!("{}:{a}", x + 1), flat);
            }
        }
        serde_json::to_string_pretty(&AssemblageJson { d: self.dim, sigma })
            .expect("assemblage JSON serialisation cannot fail")
    }

    /// Parses `{"d": int, "sigma": {"x:a": [[re, im], …]}}` with `x ∈ {1,2}`
    /// and each matrix flattened row-major.
    pub fn from_json(text: &str) -> Result<Assemblage> {
        let doc: AssemblageJson =
            serde_json::from_str(text).map_err(|e| Error::data(format!("invalid assemblage JSON: {e}")))?;
        let d = doc.d;
        if d == 0 || d > MAX_SERIALIZED_DIM {
            return Err(Error::data(format!("unsupported dimension {d}")));
        }
        let mut cells: [BTreeMap<usize, ComplexMatrix>; INPUTS] = Default::default();
        for (key, flat) in doc.sigma {
            let (x, a) = key
                .split_once(':')
                .and_then(|(x, a)| Some((x.trim().parse::<usize>().ok()?, a.trim().parse::<usize>().ok()?)))
                .ok_or_else(|| Error::data(format!("invalid key {key:?}; expected \"x:a\"")))?;
            if !(1..=INPUTS).contains(&x) {
                return Err(Error::data(format!("input {x} in key {key:?} must be 1 or 2")));
            }
            if flat.len() != d * d {
                return Err(Error::data(format!(
                    "entry {key:?} has {} values, expected {}",
                    flat.len(),
                    d * d
                )));
            }
            let m = ComplexMatrix::from_fn(d, d, |i, j| {
                let [re, im] = flat[i * d + j];
                C64::new(re, im)
            });
            if cells[x - 1].insert(a, m).is_some() {
                return Err(Error::data(format!("duplicate key {key:?}")));
            }
        }
        let outcomes = cells[0].len();
        for (x, row) in cells.iter().enumerate() {
            if outcomes == 0 || row.len() != outcomes {
                return Err(Error::data(format!("input {} has {} outcomes, expected {outcomes}", x + 1, row.len())));
            }
            if let Some((i, k)) = row.keys().enumerate().find(|(i, k)| i != *k) {
                return Err(Error::data(format!("input {} is missing outcome {i} (next key {k})", x + 1)));
            }
        }
        let states: [Vec<ComplexMatrix>; INPUTS] = std::array::from_fn(|x| std::mem::take(&mut cells[x]).into_values().collect());
        Assemblage::new(states).map_err(|e| Error::data(e.to_string()))
    }
}

#[derive(Serialize, Deserialize)]
struct AssemblageJson {
    d: usize,
    sigma: BTreeMap<String, Vec<[f64; 2]>>,
}

/// `σ_{a|x} = Tr_A[(A_{a|x} ⊗ 1) ρ]`.
pub fn steer(rho: &DensityMatrix, setting: &SteeringSetting) -> Result<Assemblage> {
    let dim_a = setting.dim();
    let n = rho.dim();
    if dim_a == 0 || !n.is_multiple_of(dim_a) {
        return Err(Error::shape(format!(
            "state of dim {n} does not factor with Alice's dimension {dim_a}"
        )));
    }
    let dim_b = n / dim_a;
    let m = rho.matrix();
    let states = std::array::from_fn(|x| {
        setting
            .measurement(x)
            .operators()
            .iter()
            .map(|op| {
                // σ_kl = Σ_ij A_ij ρ_{(j,k),(i,l)}
                let mut s = ComplexMatrix::zeros(dim_b, dim_b);
                for i in 0..dim_a {
                    for j in 0..dim_a {
                        let aij = op[(i, j)];
                        if aij == C64::new(0.0, 0.0) {
                            continue;
                        }
                        for k in 0..dim_b {
                            for l in 0..dim_b {
                                s[(k, l)] += aij * m[(j * dim_b + k, i * dim_b + l)];
                            }
                        }
                    }
                }
                qcore::hermitian_part(&s)
            })
            .collect()
    });
    Assemblage::new(states)
}

/// Normalised `Σ_a σ_{a|x}`.
pub fn total_state(sigma: &Assemblage) -> Result<DensityMatrix> {
    let residual = sigma.no_signalling_residual();
    if residual > NO_SIGNALLING_TOL {
        return Err(Error::consistency(format!("no-signalling violated by {residual:e}")));
    }
    Ok(DensityMatrix::from_parts(qcore::hermitian_part(&sigma.marginal(0)), true))
}

/// A map `x ↦ a`; `D_μ(a|x) = 1` iff the strategy outputs `a` on input `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DeterministicStrategy {
    outputs: [usize; INPUTS],
}

impl DeterministicStrategy {
    pub fn new(first: usize, second: usize) -> Self {
        DeterministicStrategy {
            outputs: [first, second],
        }
    }

    pub fn output(&self, x: usize) -> usize {
        self.outputs[x]
    }

    /// `D_μ(a|x)` as 0/1.
    pub fn indicator(&self, a: usize, x: usize) -> bool {
        self.outputs[x] == a
    }

    /// Position in [`enumerate_strategies`] order.
    pub fn index(&self, outcomes: usize) -> usize {
        self.outputs[0] * outcomes + self.outputs[1]
    }
}

/// All `outcomes²` strategies; first output outer, second inner.
pub fn enumerate_strategies(outcomes: usize) -> Vec<DeterministicStrategy> {
    (0..outcomes)
        .flat_map(|a1| (0..outcomes).map(move |a2| DeterministicStrategy::new(a1, a2)))
        .collect()
}

/// Local states `ρ_μ`, one per deterministic strategy in enumeration order.
#[derive(Debug, Clone, PartialEq)]
pub struct LhsModel {
    dim: usize,
    outcomes: usize,
    local_states: Vec<ComplexMatrix>,
}

impl LhsModel {
    pub fn new(outcomes: usize, local_states: Vec<ComplexMatrix>) -> Result<Self> {
        if outcomes == 0 || local_states.len() != outcomes * outcomes {
            return Err(Error::shape(format!(
                "{} local states given, expected {}",
                local_states.len(),
                outcomes * outcomes
            )));
        }
        let dim = local_states[0].nrows();
        for (mu, s) in local_states.iter().enumerate() {
            if s.nrows() != dim || s.ncols() != dim {
                return Err(Error::shape(format!("local state {mu} is not {dim}x{dim}")));
            }
            if !qcore::all_finite(s) || !qcore::is_psd(s, LHS_PSD_TOL) {
                return Err(Error::consistency(format!("local state {mu} is not PSD")));
            }
        }
        Ok(LhsModel {
            dim,
            outcomes,
            local_states,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn outcomes(&self) -> usize {
        self.outcomes
    }

    pub fn local_states(&self) -> &[ComplexMatrix] {
        &self.local_states
    }

    pub fn local_state(&self, strategy: DeterministicStrategy) -> &ComplexMatrix {
        &self.local_states[strategy.index(self.outcomes)]
    }

    /// `Σ_μ D_μ(a|x) ρ_μ` without any normalisation check.
    pub fn raw_cells(&self) -> [Vec<ComplexMatrix>; INPUTS] {
        let zero = ComplexMatrix::zeros(self.dim, self.dim);
        let mut cells: [Vec<ComplexMatrix>; INPUTS] = std::array::from_fn(|_| vec![zero.clone(); self.outcomes]);
        for strategy in enumerate_strategies(self.outcomes) {
            let rho = self.local_state(strategy);
            for (x, row) in cells.iter_mut().enumerate() {
                row[strategy.output(x)] += rho;
            }
        }
        cells
    }

    /// Largest entrywise deviation between the generated cells and `sigma`.
    pub fn reconstruction_error(&self, sigma: &Assemblage) -> f64 {
        if sigma.dim() != self.dim || sigma.outcomes() != self.outcomes {
            return f64::INFINITY;
        }
        let cells = self.raw_cells();
        let mut worst = 0.0f64;
        for x in 0..INPUTS {
            for a in 0..self.outcomes {
                worst = worst.max(qcore::max_abs_diff(&cells[x][a], sigma.state(x, a)));
            }
        }
        worst
    }
}

/// The assemblage generated by an LHS model.
pub fn evaluate_lhs(model: &LhsModel, d: usize) -> Result<Assemblage> {
    if model.dim() != d {
        return Err(Error::shape(format!(
            "model states are {}x{}, expected {d}x{d}",
            model.dim(),
            model.dim()
        )));
    }
    Assemblage::new(model.raw_cells())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mub::{self, Basis};
    use crate::qcore::{isotropic_state, max_entangled, random, tensor};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn mub_setting(d: usize, x1: usize, x2: usize) -> SteeringSetting {
        SteeringSetting::from_bases(&mub::mub_basis(d, x1).unwrap(), &mub::mub_basis(d, x2).unwrap()).unwrap()
    }

    fn random_setting(dim: usize, rng: &mut ChaCha8Rng) -> SteeringSetting {
        let m1 = Measurement::new(random::povm(dim, dim, rng)).unwrap();
        let m2 = Measurement::new(random::povm(dim, dim, rng)).unwrap();
        SteeringSetting::new(m1, m2).unwrap()
    }

    #[test]
    fn max_entangled_gives_transposed_projectors() {
        let d = 5;
        let setting = SteeringSetting::from_bases(&Basis::computational(d).unwrap(), &mub::mub_basis(d, 2).unwrap())
            .unwrap();
        let rho = DensityMatrix::pure(&max_entangled(d).unwrap());
        let sigma = steer(&rho, &setting).unwrap();
        for x in 0..2 {
            for a in 0..d {
                let expected = setting.measurement(x).operator(a).transpose().unscale(d as f64);
                assert!(qcore::max_abs_diff(sigma.state(x, a), &expected) < 1e-14);
            }
        }
    }

    #[test]
    fn product_state_factorises() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rho_a = random::density_matrix(3, &mut rng);
        let rho_b = random::density_matrix(2, &mut rng);
        let rho = DensityMatrix::new(tensor(&rho_a, &rho_b)).unwrap();
        let setting = random_setting(3, &mut rng);
        let sigma = steer(&rho, &setting).unwrap();
        for x in 0..2 {
            for a in 0..3 {
                let p = qcore::trace_product(setting.measurement(x).operator(a), &rho_a);
                assert!(qcore::max_abs_diff(sigma.state(x, a), &rho_b.scale(p)) < 1e-13);
            }
        }
        let total = total_state(&sigma).unwrap();
        assert!(qcore::max_abs_diff(total.matrix(), &rho_b) < 1e-13);
    }

    #[test]
    fn isotropic_no_signalling_and_marginal() {
        for v in [0.0, 0.3, 0.5, 1.0] {
            let rho = isotropic_state(3, v).unwrap();
            let sigma = steer(&rho, &mub_setting(3, 0, 1)).unwrap();
            assert!(sigma.no_signalling_residual() < 1e-12);
            let total = total_state(&sigma).unwrap();
            assert!(total.is_normalised());
            assert!(qcore::max_abs_diff(total.matrix(), &qcore::identity(3).unscale(3.0)) < 1e-14);
        }
    }

    #[test]
    fn steer_rejects_mismatched_dimensions() {
        let rho = isotropic_state(3, 0.5).unwrap();
        let setting = mub_setting(5, 0, 1);
        assert!(matches!(steer(&rho, &setting), Err(Error::Shape(_))));
    }

    #[test]
    fn strategy_enumeration() {
        assert_eq!(enumerate_strategies(2).len(), 4);
        assert_eq!(enumerate_strategies(5).len(), 25);
        let all = enumerate_strategies(31);
        assert_eq!(all.len(), 961);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        for (i, s) in all.iter().enumerate() {
            assert_eq!(s.index(31), i);
        }
        assert_eq!(enumerate_strategies(3)[1], DeterministicStrategy::new(0, 1));
    }

    #[test]
    fn lhs_single_strategy() {
        let d = 3;
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rho = random::density_matrix(d, &mut rng);
        let mut states = vec![ComplexMatrix::zeros(d, d); d * d];
        states[0] = rho.clone();
        let model = LhsModel::new(d, states).unwrap();
        let sigma = evaluate_lhs(&model, d).unwrap();
        for x in 0..2 {
            assert!(qcore::max_abs_diff(sigma.state(x, 0), &rho) < 1e-15);
            for a in 1..d {
                assert!(sigma.state(x, a).iter().all(|z| z.norm() == 0.0));
            }
        }
    }

    #[test]
    fn lhs_uniform_states() {
        let d = 4;
        let rho = qcore::identity(d).unscale((d * d * d) as f64);
        let model = LhsModel::new(d, vec![rho; d * d]).unwrap();
        let sigma = evaluate_lhs(&model, d).unwrap();
        let expected = qcore::identity(d).unscale((d * d) as f64);
        for x in 0..2 {
            for a in 0..d {
                assert!(qcore::max_abs_diff(sigma.state(x, a), &expected) < 1e-15);
            }
        }
        assert!(matches!(evaluate_lhs(&model, 3), Err(Error::Shape(_))));
    }

    #[test]
    fn lhs_reproduces_product_state_assemblage() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (da, db) = (3, 3);
        let rho_a = random::density_matrix(da, &mut rng);
        let rho_b = random::density_matrix(db, &mut rng);
        let rho = DensityMatrix::new(tensor(&rho_a, &rho_b)).unwrap();
        let setting = random_setting(da, &mut rng);
        let sigma = steer(&rho, &setting).unwrap();
        let p = |x: usize, a: usize| qcore::trace_product(setting.measurement(x).operator(a), &rho_a);
        let states = enumerate_strategies(da)
            .into_iter()
            .map(|s| rho_b.scale(p(0, s.output(0)) * p(1, s.output(1))))
            .collect();
        let model = LhsModel::new(da, states).unwrap();
        assert!(model.reconstruction_error(&sigma) < 1e-9);
    }

    #[test]
    fn assemblage_validation() {
        let half = qcore::identity(2).scale(0.25);
        assert!(Assemblage::new([vec![half.clone(), half.clone()], vec![half.clone(), half.clone()]]).is_ok());
        let skew = qcore::identity(2).scale(0.5);
        let zero = ComplexMatrix::zeros(2, 2);
        // marginals differ
        let mut other = zero.clone();
        other[(0, 0)] = C64::new(1.0, 0.0);
        assert!(matches!(
            Assemblage::new([vec![skew.clone(), skew.clone()], vec![other, zero.clone()]]),
            Err(Error::Consistency(_))
        ));
        assert!(matches!(
            Assemblage::new([vec![half.clone()], vec![half.clone(), half]]),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn measurement_validation() {
        let p = qcore::identity(2).scale(0.5);
        assert!(Measurement::new(vec![p.clone(), p.clone()]).is_ok());
        assert!(matches!(Measurement::new(vec![p.clone()]), Err(Error::Consistency(_))));
        assert_eq!(Measurement::trivial(3, 3).unwrap().outcomes(), 3);
    }

    #[test]
    fn json_round_trip() {
        let sigma = steer(&isotropic_state(3, 0.7).unwrap(), &mub_setting(3, 0, 2)).unwrap();
        let text = sigma.to_json();
        assert!(text.contains("\"2:1\""));
        let back = Assemblage::from_json(&text).unwrap();
        for x in 0..2 {
            for a in 0..3 {
                assert_eq!(back.state(x, a), sigma.state(x, a));
            }
        }
        assert!(Assemblage::from_json(&text.replace("\"2:1\"", "\"3:1\"")).is_err());
        assert!(Assemblage::from_json(&text.replace("\"2:1\"", "\"2:7\"")).is_err());
        assert!(Assemblage::from_json("{\"d\": 2, \"sigma\": {}}").is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(32))]

            #[test]
            fn random_states_give_no_signalling_assemblages(seed in any::<u64>(), dim in 2usize..8) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let rho = DensityMatrix::new(random::density_matrix(dim * dim, &mut rng)).unwrap();
                let setting = random_setting(dim, &mut rng);
                let sigma = steer(&rho, &setting).unwrap();
                prop_assert!(sigma.no_signalling_residual() < NO_SIGNALLING_TOL);
                let reduced = qcore::partial_trace_a(rho.matrix(), dim, dim).unwrap();
                prop_assert!(qcore::max_abs_diff(&sigma.marginal(1), &reduced) < 1e-12);
            }

            #[test]
            fn steer_is_linear(seed in any::<u64>(), dim in 2usize..5, p in 0.0f64..=1.0) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let r1 = DensityMatrix::new(random::density_matrix(dim * dim, &mut rng)).unwrap();
                let r2 = DensityMatrix::new(random::density_matrix(dim * dim, &mut rng)).unwrap();
                let setting = random_setting(dim, &mut rng);
                let lhs = steer(&r1.mix(&r2, p).unwrap(), &setting).unwrap();
                let rhs = steer(&r1, &setting).unwrap().mix(&steer(&r2, &setting).unwrap(), p).unwrap();
                for x in 0..2 {
                    for a in 0..dim {
                        prop_assert!(qcore::max_abs_diff(lhs.state(x, a), rhs.state(x, a)) < 1e-12);
                    }
                }
            }
        }
    }
}
