//! Coincidence counts: ingestion, simulation and certification with
//! bootstrap error bars.
//!
//! Counts `N_{ab|x}` for a basis `x` are normalised per basis under the fair
//! sampling assumption. Only the diagonal `a = b` enters the steering
//! functional; the off-diagonal cells still feed the bootstrap through the
//! per-basis totals.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mub::{Basis, BasisLabel};
use crate::qcore::{ComplexMatrix, DensityMatrix};
use crate::robustness::{certified_schmidt, Certificate};

/// Probabilities more negative than this are treated as a broken model.
pub const NEGATIVE_PROBABILITY_TOL: f64 = 1e-10;
pub const DEFAULT_RESAMPLES: usize = 1000;
/// Largest dimension accepted from a counts file.
pub const MAX_TABLE_DIM: usize = 256;

const FAIR_SAMPLING: &str =
    "counts are normalised per basis; detected coincidences are assumed to be a fair sample of all events";
const NO_LOSS_MODEL: &str = "measurements are treated as complete projective measurements; no-click events are not modelled";

#[derive(Debug, Clone, PartialEq)]
pub struct CoincidenceTable {
    d: usize,
    counts: BTreeMap<BasisLabel, Vec<f64>>,
}

fn check_label(label: BasisLabel, d: usize) -> Result<()> {
    match label {
        BasisLabel::Index(k) if k >= d => Err(Error::data(format!("basis label {k} is not below d = {d}"))),
        _ => Ok(()),
    }
}

impl CoincidenceTable {
    /// `counts[x]` holds the `d×d` grid for basis `x` in row-major order `a*d + b`.
    pub fn new(d: usize, counts: BTreeMap<BasisLabel, Vec<f64>>) -> Result<Self> {
        if d < 2 {
            return Err(Error::data(format!("dimension {d} must be at least 2")));
        }
        if counts.is_empty() {
            return Err(Error::data("no bases in the table"));
        }
        for (&label, grid) in &counts {
            check_label(label, d)?;
            if grid.len() != d * d {
                return Err(Error::data(format!("basis {label} has {} cells, expected {}", grid.len(), d * d)));
            }
            if let Some(bad) = grid.iter().find(|n| !n.is_finite() || **n < 0.0) {
                return Err(Error::data(format!("basis {label} has invalid count {bad}")));
            }
            if grid.iter().sum::<f64>() <= 0.0 {
                return Err(Error::data(format!("basis {label} has no counts")));
            }
        }
        Ok(CoincidenceTable { d, counts })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn labels(&self) -> Vec<BasisLabel> {
        self.counts.keys().copied().collect()
    }

    pub fn grid(&self, label: BasisLabel) -> Option<&[f64]> {
        self.counts.get(&label).map(Vec::as_slice)
    }

    pub fn count(&self, label: BasisLabel, a: usize, b: usize) -> Option<f64> {
        self.grid(label).map(|g| g[a * self.d + b])
    }

    pub fn total(&self, label: BasisLabel) -> Option<f64> {
        self.grid(label).map(|g| g.iter().sum())
    }

    /// The sub-table with just the two given bases.
    pub fn pair(&self, first: BasisLabel, second: BasisLabel) -> Result<CoincidenceTable> {
        if first == second {
            return Err(Error::data(format!("pair needs two distinct bases, got {first} twice")));
        }
        let mut counts = BTreeMap::new();
        for label in [first, second] {
            let grid = self
                .counts
                .get(&label)
                .ok_or_else(|| Error::data(format!("basis {label} not present in the table")))?;
            counts.insert(label, grid.clone());
        }
        Ok(CoincidenceTable { d: self.d, counts })
    }

    /// Parses the `x,a,b,count` format. Absent cells read as zero. If `d` is not
    /// given it is inferred as one more than the largest outcome index.
    pub fn from_csv(text: &str, d: Option<usize>) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
        let header = reader.headers().map_err(|e| Error::data(format!("line 1: {e}")))?;
        if header.iter().collect::<Vec<_>>() != ["x", "a", "b", "count"] {
            return Err(Error::data("line 1: expected header x,a,b,count"));
        }
        let mut cells: BTreeMap<(BasisLabel, usize, usize), f64> = BTreeMap::new();
        for record in reader.records() {
            let record = record.map_err(|e| {
                let line = e.position().map_or(0, |p| p.line());
                Error::data(format!("line {line}: {e}"))
            })?;
            let line = record.position().map_or(0, |p| p.line());
            let bad = |what: &str| Error::data(format!("line {line}: {what}"));
            if record.len() != 4 {
                return Err(bad("expected 4 fields"));
            }
            let label: BasisLabel = record[0].parse().map_err(|_| bad("invalid basis label"))?;
            let a: usize = record[1].parse().map_err(|_| bad("invalid outcome a"))?;
            let b: usize = record[2].parse().map_err(|_| bad("invalid outcome b"))?;
            let n: f64 = record[3].parse().map_err(|_| bad("invalid count"))?;
            if !n.is_finite() || n < 0.0 {
                return Err(bad("count must be a non-negative number"));
            }
            let limit = d.unwrap_or(MAX_TABLE_DIM);
            if a >= limit || b >= limit {
                return Err(bad("outcome index out of range"));
            }
            if cells.insert((label, a, b), n).is_some() {
                return Err(bad("duplicate cell"));
            }
        }
        let d = match d {
            Some(d) => d,
            None => cells.keys().map(|&(_, a, b)| a.max(b) + 1).max().unwrap_or(0),
        };
        if d > MAX_TABLE_DIM {
            return Err(Error::data(format!("dimension {d} is too large")));
        }
        let mut counts: BTreeMap<BasisLabel, Vec<f64>> = BTreeMap::new();
        for ((label, a, b), n) in cells {
            counts.entry(label).or_insert_with(|| vec![0.0; d * d])[a * d + b] = n;
        }
        CoincidenceTable::new(d, counts)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,a,b,count\n");
        for (label, grid) in &self.counts {
            for a in 0..self.d {
                for b in 0..self.d {
                    out.push_str(&format!("{label},{a},{b},{}\n", grid[a * self.d + b]));
                }
            }
        }
        out
    }
}

/// Per-basis normalised coincidence probabilities `p(a,b|x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelatorTable {
    d: usize,
    probabilities: BTreeMap<BasisLabel, Vec<f64>>,
}

impl CorrelatorTable {
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn labels(&self) -> Vec<BasisLabel> {
        self.probabilities.keys().copied().collect()
    }

    pub fn probability(&self, label: BasisLabel, a: usize, b: usize) -> Option<f64> {
        self.probabilities.get(&label).map(|p| p[a * self.d + b])
    }

    /// `Σ_a p(a,a|x)` for one basis.
    pub fn diagonal(&self, label: BasisLabel) -> Option<f64> {
        self.probabilities
            .get(&label)
            .map(|p| (0..self.d).map(|a| p[a * self.d + a]).sum())
    }

    /// `Σ_x Σ_a p(a,a|x)` over every basis in the table.
    pub fn diagonal_sum(&self) -> f64 {
        self.probabilities.keys().filter_map(|&l| self.diagonal(l)).sum()
    }
}

pub fn normalise(counts: &CoincidenceTable) -> Result<CorrelatorTable> {
    let mut probabilities = BTreeMap::new();
    for (&label, grid) in &counts.counts {
        let total: f64 = grid.iter().sum();
        if !(total > 0.0) {
            return Err(Error::data(format!("basis {label} has no counts")));
        }
        probabilities.insert(label, grid.iter().map(|n| n / total).collect());
    }
    Ok(CorrelatorTable {
        d: counts.d,
        probabilities,
    })
}

/// `p(a,b|x) = Tr[(A_{a|x} ⊗ A_{b|x}ᵀ) ρ]` for a rank-one basis, as a row-major grid.
pub fn coincidence_probabilities(rho: &DensityMatrix, basis: &Basis) -> Result<Vec<f64>> {
    let d = basis.dim();
    if rho.dim() != d * d {
        return Err(Error::shape(format!("state of dim {} does not match basis dim {d}", rho.dim())));
    }
    let u = ComplexMatrix::from_fn(d, d, |i, a| basis.vectors()[a].amplitudes()[i]);
    let uc = u.conjugate();
    let ut = u.transpose();
    let m = rho.matrix();
    // X[r, (a,b)] = (Uᵀ R_r U*)[a,b] with R_r the r-th row of ρ reshaped to d×d.
    let mut x = ComplexMatrix::zeros(d * d, d * d);
    for r in 0..d * d {
        let row = ComplexMatrix::from_fn(d, d, |i, k| m[(r, i * d + k)]);
        let t = &ut * row * &uc;
        for a in 0..d {
            for b in 0..d {
                x[(r, a * d + b)] = t[(a, b)];
            }
        }
    }
    let mut p = vec![0.0; d * d];
    for a in 0..d {
        for b in 0..d {
            let mut acc = crate::C64::new(0.0, 0.0);
            for j in 0..d {
                for l in 0..d {
                    acc += (u[(j, a)] * uc[(l, b)]).conj() * x[(j * d + l, a * d + b)];
                }
            }
            if acc.re < -NEGATIVE_PROBABILITY_TOL {
                return Err(Error::Model(format!("negative probability {} in basis {}", acc.re, basis.label())));
            }
            p[a * d + b] = acc.re.max(0.0);
        }
    }
    Ok(p)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sampling {
    /// Independent Poisson counts, one generator stream per basis.
    Poisson { seed: u64 },
    /// Expected counts, no sampling noise.
    Exact,
}

/// Coincidence counts for the given bases with `mean_per_basis` expected events each.
pub fn simulate_counts(
    rho: &DensityMatrix,
    bases: &[Basis],
    mean_per_basis: f64,
    sampling: Sampling,
) -> Result<CoincidenceTable> {
    if !(mean_per_basis > 0.0) || !mean_per_basis.is_finite() {
        return Err(Error::domain(format!("mean count {mean_per_basis} must be positive")));
    }
    let d = bases
        .first()
        .ok_or_else(|| Error::domain("at least one basis is required"))?
        .dim();
    let mut counts = BTreeMap::new();
    for (stream, basis) in bases.iter().enumerate() {
        if basis.dim() != d {
            return Err(Error::shape("bases differ in dimension"));
        }
        let p = coincidence_probabilities(rho, basis)?;
        let grid = match sampling {
            Sampling::Exact => p.iter().map(|q| q * mean_per_basis).collect(),
            Sampling::Poisson { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(stream as u64);
                p.iter().map(|q| poisson(q * mean_per_basis, &mut rng)).collect::<Result<Vec<_>>>()?
            }
        };
        if counts.insert(basis.label(), grid).is_some() {
            return Err(Error::domain(format!("basis {} requested twice", basis.label())));
        }
    }
    CoincidenceTable::new(d, counts).map_err(|e| match e {
        Error::Data(msg) => Error::Model(msg),
        other => other,
    })
}

fn poisson(mean: f64, rng: &mut ChaCha8Rng) -> Result<f64> {
    if mean <= 0.0 {
        return Ok(0.0);
    }
    let dist = Poisson::new(mean).map_err(|e| Error::Model(format!("Poisson mean {mean}: {e}")))?;
    Ok(dist.sample(rng))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResampleSpec {
    pub resamples: usize,
    pub seed: u64,
}

impl ResampleSpec {
    pub fn new(seed: u64) -> Self {
        ResampleSpec {
            resamples: DEFAULT_RESAMPLES,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificateWithError {
    pub d: usize,
    pub pair: [BasisLabel; 2],
    pub certificate: Certificate,
    pub delta_std: f64,
    pub certified_at_1sigma: u32,
    pub certified_at_3sigma: u32,
    pub resamples: usize,
    pub seed: Option<u64>,
    /// Total counts per basis, when raw counts were available.
    pub basis_totals: BTreeMap<BasisLabel, f64>,
}

/// `ceil` of `δ − k·σ`, never below 1.
pub fn certified_at(delta: f64, std: f64, k: f64) -> Result<u32> {
    certified_schmidt((delta - k * std).max(1.0))
}

fn pair_of(table: &CorrelatorTable) -> Result<[BasisLabel; 2]> {
    match table.labels().as_slice() {
        &[a, b] => Ok([a, b]),
        other => Err(Error::data(format!("certification needs exactly two bases, got {}", other.len()))),
    }
}

fn delta_of(table: &CorrelatorTable, lambda: f64) -> Result<f64> {
    Ok(Certificate::from_functional_value(table.diagonal_sum(), lambda)?.delta)
}

/// Point certificate from the two-basis correlators, with a parametric
/// bootstrap over `raw` when given.
pub fn certify(
    correlators: &CorrelatorTable,
    lambda: f64,
    resample: Option<(ResampleSpec, &CoincidenceTable)>,
) -> Result<CertificateWithError> {
    let pair = pair_of(correlators)?;
    let certificate = Certificate::from_functional_value(correlators.diagonal_sum(), lambda)?;
    let (delta_std, resamples, seed, basis_totals) = match resample {
        None => (0.0, 0, None, BTreeMap::new()),
        Some((spec, raw)) => {
            let raw = raw.pair(pair[0], pair[1])?;
            if raw.dim() != correlators.dim() {
                return Err(Error::data("raw counts and correlators differ in dimension"));
            }
            let std = bootstrap_std(&raw, lambda, spec)?;
            let totals = pair.iter().map(|&l| (l, raw.total(l).unwrap_or(0.0))).collect();
            (std, spec.resamples, Some(spec.seed), totals)
        }
    };
    Ok(CertificateWithError {
        d: correlators.dim(),
        pair,
        certificate,
        delta_std,
        certified_at_1sigma: certified_at(certificate.delta, delta_std, 1.0)?,
        certified_at_3sigma: certified_at(certificate.delta, delta_std, 3.0)?,
        resamples,
        seed,
        basis_totals,
    })
}

/// Sample standard deviation of δ over Poisson resamples of every cell.
/// Resample `r` uses stream `r` of a generator seeded with `spec.seed`.
fn bootstrap_std(raw: &CoincidenceTable, lambda: f64, spec: ResampleSpec) -> Result<f64> {
    if spec.resamples < 2 {
        return Ok(0.0);
    }
    let deltas = (0..spec.resamples)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            rng.set_stream(r as u64);
            let mut counts = BTreeMap::new();
            for (&label, grid) in &raw.counts {
                // An empty draw cannot be normalised; redraw from the same stream.
                let resampled = loop {
                    let g = grid.iter().map(|&n| poisson(n, &mut rng)).collect::<Result<Vec<_>>>()?;
                    if g.iter().sum::<f64>() > 0.0 {
                        break g;
                    }
                };
                counts.insert(label, resampled);
            }
            delta_of(&normalise(&CoincidenceTable::new(raw.d, counts)?)?, lambda)
        })
        .collect::<Result<Vec<f64>>>()?;
    let n = deltas.len() as f64;
    let mean = deltas.iter().sum::<f64>() / n;
    let var = deltas.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(var.sqrt())
}

/// Certificates for every unordered pair of bases present, ordered by pair label.
/// Each pair's bootstrap uses the same seed, so pairs with identical data get
/// identical certificates.
pub fn scan_pairs(
    counts: &CoincidenceTable,
    lambda: f64,
    resample: Option<ResampleSpec>,
) -> Result<Vec<CertificateWithError>> {
    let labels = counts.labels();
    if labels.len() < 2 {
        return Err(Error::data(format!("a scan needs at least two bases, got {}", labels.len())));
    }
    let mut pairs = Vec::new();
    for (i, &a) in labels.iter().enumerate() {
        for &b in &labels[i + 1..] {
            pairs.push((a, b));
        }
    }
    pairs
        .into_par_iter()
        .map(|(a, b)| {
            let sub = counts.pair(a, b)?;
            certify(&normalise(&sub)?, lambda, resample.map(|spec| (spec, &sub)))
        })
        .collect()
}

/// A δ estimate for one basis pair in dimension `d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaEstimate {
    pub d: usize,
    pub delta: f64,
    pub delta_std: f64,
}

impl From<&CertificateWithError> for DeltaEstimate {
    fn from(c: &CertificateWithError) -> Self {
        DeltaEstimate {
            d: c.d,
            delta: c.certificate.delta,
            delta_std: c.delta_std,
        }
    }
}

/// Parses `d,delta,delta_std` rows.
pub fn parse_deltas_csv(text: &str) -> Result<Vec<DeltaEstimate>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| Error::data(format!("line 1: {e}")))?;
    if header.iter().collect::<Vec<_>>() != ["d", "delta", "delta_std"] {
        return Err(Error::data("line 1: expected header d,delta,delta_std"));
    }
    let mut out = Vec::new();
    for record in reader.deserialize::<DeltaEstimate>() {
        let row = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            Error::data(format!("line {line}: {e}"))
        })?;
        let line = out.len() + 2;
        if row.d < 2 || !(row.delta >= 1.0) || !row.delta.is_finite() || !(row.delta_std >= 0.0) || !row.delta_std.is_finite() {
            return Err(Error::data(format!("line {line}: need d ≥ 2, finite δ ≥ 1 and σ ≥ 0")));
        }
        out.push(row);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReportRow {
    pub d: usize,
    pub delta_min: f64,
    pub delta_min_std: f64,
    pub delta_max: f64,
    pub delta_max_std: f64,
    pub certified_n: u32,
}

/// One row per dimension: extreme δ over pairs, certified from the largest.
pub fn table_report(estimates: &[DeltaEstimate]) -> Result<Vec<ReportRow>> {
    let mut groups: BTreeMap<usize, Vec<DeltaEstimate>> = BTreeMap::new();
    for e in estimates {
        groups.entry(e.d).or_default().push(*e);
    }
    groups
        .into_iter()
        .map(|(d, group)| {
            let mut lo = group[0];
            let mut hi = group[0];
            for e in &group[1..] {
                if e.delta < lo.delta {
                    lo = *e;
                }
                if e.delta > hi.delta {
                    hi = *e;
                }
            }
            Ok(ReportRow {
                d,
                delta_min: lo.delta,
                delta_min_std: lo.delta_std,
                delta_max: hi.delta,
                delta_max_std: hi.delta_std,
                certified_n: certified_schmidt(hi.delta)?,
            })
        })
        .collect()
}

pub fn report_csv(rows: &[ReportRow]) -> String {
    let mut out = String::from("d,delta_min,delta_min_std,delta_max,delta_max_std,certified_n\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.d, r.delta_min, r.delta_min_std, r.delta_max, r.delta_max_std, r.certified_n
        ));
    }
    out
}

#[derive(Serialize)]
struct CertificateJson<'a> {
    d: usize,
    pair: [BasisLabel; 2],
    lambda: f64,
    functional_value: f64,
    raw_dual_value: f64,
    sr_lower_bound: f64,
    delta: f64,
    delta_std: f64,
    certified_n: u32,
    certified_n_1sigma: u32,
    certified_n_3sigma: u32,
    resamples: usize,
    seed: Option<u64>,
    meta: Meta<'a>,
}

#[derive(Serialize)]
struct Meta<'a> {
    fair_sampling: &'static str,
    loss_events: &'static str,
    basis_totals: &'a BTreeMap<BasisLabel, f64>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    settings: &'a BTreeMap<String, serde_json::Value>,
    version: &'static str,
}

impl CertificateWithError {
    /// Pretty JSON with a `meta` block; `settings` records caller parameters.
    pub fn to_json(&self, settings: &BTreeMap<String, serde_json::Value>) -> String {
        let c = &self.certificate;
        let doc = CertificateJson {
            d: self.d,
            pair: self.pair,
            lambda: c.lambda,
            functional_value: c.functional_value,
            raw_dual_value: c.raw_dual_value,
            sr_lower_bound: c.sr_lower_bound,
            delta: c.delta,
            delta_std: self.delta_std,
            certified_n: c.certified_schmidt,
            certified_n_1sigma: self.certified_at_1sigma,
            certified_n_3sigma: self.certified_at_3sigma,
            resamples: self.resamples,
            seed: self.seed,
            meta: Meta {
                fair_sampling: FAIR_SAMPLING,
                loss_events: NO_LOSS_MODEL,
                basis_totals: &self.basis_totals,
                settings,
                version: env!("CARGO_PKG_VERSION"),
            },
        };
        serde_json::to_string_pretty(&doc).expect("certificate serialises") + "\n"
    }
}
