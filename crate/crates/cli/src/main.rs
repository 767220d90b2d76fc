use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hdsteer::assemblage::{evaluate_lhs, steer, Assemblage, LhsModel, SteeringSetting};
use hdsteer::expdata::{
    certify, normalise, parse_deltas_csv, report_csv, scan_pairs, simulate_counts, table_report,
    CoincidenceTable, DeltaEstimate, ResampleSpec, Sampling, DEFAULT_RESAMPLES,
};
use hdsteer::mub::{self, Basis, BasisLabel};
use hdsteer::qcore::{isotropic_state, max_entangled, random, ComplexMatrix, DensityMatrix};
use hdsteer::robustness::{critical_visibility, lambda_mub};
use hdsteer::sdp::{self, RobustnessKind, RobustnessResult, SolveStatus, SolverOptions};
use hdsteer::{Error, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "hdsteer", version, about = "Schmidt-number certification from two-setting steering data")]
struct Cli {
    /// Output file (stdout if omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for every stochastic step.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for scans and bootstrap (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    /// Primal and dual residual tolerance of the SDP solver.
    #[arg(long, global = true, default_value_t = SolverOptions::default().feas_tol)]
    tol_feas: f64,
    /// Duality-gap tolerance of the SDP solver.
    #[arg(long, global = true, default_value_t = SolverOptions::default().gap_tol)]
    tol_gap: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the complete set of d+1 mutually unbiased bases as JSON.
    Mub {
        #[arg(long)]
        d: usize,
    },
    /// Simulate coincidence counts for an isotropic state.
    Simulate(SimulateArgs),
    /// Certify the Schmidt number from coincidence counts or δ fixtures.
    Certify(CertifyArgs),
    /// Compute a robustness exactly by semidefinite programming.
    Sr(SrArgs),
    /// Tabulate critical visibilities as CSV d,n,v_star.
    Threshold(ThresholdArgs),
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    d: usize,
    /// Visibility of the isotropic state.
    #[arg(long)]
    v: f64,
    /// Expected coincidences per basis.
    #[arg(long, default_value_t = 1596.0)]
    mean: f64,
    /// Comma-separated basis labels, e.g. `c,0` or `1,2`.
    #[arg(long, conflicts_with = "all_bases", required_unless_present = "all_bases")]
    bases: Option<String>,
    /// Use all d+1 bases.
    #[arg(long)]
    all_bases: bool,
    /// Write expected counts instead of sampling.
    #[arg(long)]
    exact: bool,
}

#[derive(Args)]
struct CertifyArgs {
    /// Counts CSV with header x,a,b,count.
    #[arg(long, conflicts_with = "deltas", required_unless_present = "deltas")]
    counts: Option<PathBuf>,
    /// Basis pair to certify, e.g. `c,0`.
    #[arg(long, conflicts_with = "scan")]
    pair: Option<String>,
    /// Certify every pair and write a report CSV.
    #[arg(long)]
    scan: bool,
    /// δ fixtures with header d,delta,delta_std; writes a report CSV.
    #[arg(long)]
    deltas: Option<PathBuf>,
    /// Bootstrap resamples (0 disables error bars).
    #[arg(long, default_value_t = DEFAULT_RESAMPLES)]
    resamples: usize,
    /// Dimension, if it cannot be inferred from the counts.
    #[arg(long)]
    d: Option<usize>,
    /// Override the functional normalisation (defaults to 1 + 1/√d).
    #[arg(long)]
    lambda: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Generator {
    MaxentMub,
    Isotropic,
    LhsRandom,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Sr,
    Csr,
    Ir,
}

#[derive(Args)]
struct SrArgs {
    #[arg(long, conflicts_with = "assemblage")]
    gen: Option<Generator>,
    /// Assemblage JSON file.
    #[arg(long)]
    assemblage: Option<PathBuf>,
    #[arg(long)]
    d: Option<usize>,
    /// Visibility for the isotropic generator.
    #[arg(long)]
    v: Option<f64>,
    /// Measurement pair for the generators and for `--kind ir`.
    #[arg(long, default_value = "c,0")]
    pair: String,
    #[arg(long, value_enum, default_value = "sr")]
    kind: Kind,
    #[arg(long, default_value_t = SolverOptions::default().max_iterations)]
    max_iterations: usize,
}

#[derive(Args)]
struct ThresholdArgs {
    #[arg(long, default_value_t = 3)]
    d_min: u64,
    #[arg(long, default_value_t = 31)]
    d_max: u64,
    #[arg(long, default_value_t = 1)]
    n_min: u64,
    /// Largest n per row, capped at d.
    #[arg(long)]
    n_max: Option<u64>,
}

/// Exit statuses.
const NOT_CERTIFIED: u8 = 1;
const USAGE: u8 = 2;
const NOT_CONVERGED: u8 = 3;

struct Failure(u8, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(USAGE, e.to_string())
    }
}

fn fail(msg: impl Into<String>) -> Failure {
    Failure(USAGE, msg.into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.jobs > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(USAGE);
        }
    }
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    match &cli.command {
        Command::Mub { d } => {
            let set = mub::mub_set(*d)?;
            emit(cli, &(set.to_json() + "\n"))?;
            Ok(0)
        }
        Command::Simulate(args) => simulate(cli, args),
        Command::Certify(args) => certify_cmd(cli, args),
        Command::Sr(args) => sr(cli, args),
        Command::Threshold(args) => threshold(cli, args),
    }
}

fn emit(cli: &Cli, text: &str) -> Result<(), Failure> {
    match &cli.out {
        Some(path) => fs::write(path, text).map_err(|e| fail(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| fail(format!("cannot read {}: {e}", path.display())))
}

fn parse_labels(text: &str) -> Result<Vec<BasisLabel>, Failure> {
    text.split(',')
        .map(|s| s.trim().parse::<BasisLabel>().map_err(Failure::from))
        .collect()
}

fn parse_pair(text: &str) -> Result<[BasisLabel; 2], Failure> {
    match parse_labels(text)?.as_slice() {
        &[a, b] if a != b => Ok([a, b]),
        _ => Err(fail(format!("pair {text:?} must name two distinct bases"))),
    }
}

/// MUB basis by label; in dimension 2 only the computational and Fourier bases exist.
fn basis(d: usize, label: BasisLabel) -> Result<Basis, Failure> {
    if d == 2 {
        return match label {
            BasisLabel::Computational => Ok(Basis::computational(2)?),
            BasisLabel::Index(0) => Ok(Basis::fourier(2)?),
            other => Err(fail(format!("basis {other} is not available in dimension 2"))),
        };
    }
    Ok(mub::basis_by_label(d, label)?)
}

fn check_visibility(v: f64) -> Result<(), Failure> {
    if !(0.0..=1.0).contains(&v) {
        return Err(fail(format!("visibility {v} must lie in [0, 1]")));
    }
    Ok(())
}

fn simulate(cli: &Cli, args: &SimulateArgs) -> Result<u8, Failure> {
    check_visibility(args.v)?;
    let set = mub::mub_set(args.d)?;
    let bases: Vec<Basis> = match &args.bases {
        Some(text) => parse_labels(text)?
            .into_iter()
            .map(|l| basis(args.d, l))
            .collect::<Result<_, _>>()?,
        None => set.bases().to_vec(),
    };
    let sampling = if args.exact {
        Sampling::Exact
    } else {
        let seed = cli.seed.ok_or_else(|| fail("simulate needs --seed unless --exact is given"))?;
        Sampling::Poisson { seed }
    };
    let rho = isotropic_state(args.d, args.v)?;
    let table = simulate_counts(&rho, &bases, args.mean, sampling)?;
    emit(cli, &table.to_csv())?;
    Ok(0)
}

fn certify_cmd(cli: &Cli, args: &CertifyArgs) -> Result<u8, Failure> {
    if let Some(path) = &args.deltas {
        let estimates = parse_deltas_csv(&read(path)?)?;
        return report(cli, &estimates);
    }
    let path = args.counts.as_ref().expect("clap enforces counts or deltas");
    let counts = CoincidenceTable::from_csv(&read(path)?, args.d)?;
    let d = counts.dim();
    let lambda = match args.lambda {
        Some(l) => l,
        None => lambda_mub(d)?,
    };
    let resample = if args.resamples > 0 {
        let seed = cli
            .seed
            .ok_or_else(|| fail("bootstrap needs --seed (or pass --resamples 0)"))?;
        Some(ResampleSpec {
            resamples: args.resamples,
            seed,
        })
    } else {
        None
    };
    if args.scan {
        let certs = scan_pairs(&counts, lambda, resample)?;
        let estimates: Vec<DeltaEstimate> = certs.iter().map(DeltaEstimate::from).collect();
        return report(cli, &estimates);
    }
    let pair = match &args.pair {
        Some(text) => parse_pair(text)?,
        None => match counts.labels().as_slice() {
            &[a, b] => [a, b],
            _ => return Err(fail("counts hold more than two bases; pass --pair or --scan")),
        },
    };
    let sub = counts.pair(pair[0], pair[1])?;
    let cert = certify(&normalise(&sub)?, lambda, resample.map(|spec| (spec, &sub)))?;
    let mut settings = BTreeMap::new();
    settings.insert("ceil_guard".to_string(), serde_json::json!(hdsteer::robustness::CEIL_GUARD));
    settings.insert("lambda_override".to_string(), serde_json::json!(args.lambda.is_some()));
    emit(cli, &cert.to_json(&settings))?;
    Ok(if cert.certificate.certified_schmidt >= 2 { 0 } else { NOT_CERTIFIED })
}

fn report(cli: &Cli, estimates: &[DeltaEstimate]) -> Result<u8, Failure> {
    let rows = table_report(estimates)?;
    emit(cli, &report_csv(&rows))?;
    Ok(if rows.iter().any(|r| r.certified_n >= 2) { 0 } else { NOT_CERTIFIED })
}

fn setting(d: usize, pair: [BasisLabel; 2]) -> Result<SteeringSetting, Failure> {
    Ok(SteeringSetting::from_bases(&basis(d, pair[0])?, &basis(d, pair[1])?)?)
}

fn random_lhs_assemblage(d: usize, seed: u64) -> Result<Assemblage, Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let states: Vec<ComplexMatrix> = (0..d * d).map(|_| random::density_matrix(d, &mut rng)).collect();
    let weights: Vec<f64> = (0..d * d).map(|_| rand::Rng::random_range(&mut rng, 0.05..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let scaled = states
        .into_iter()
        .zip(&weights)
        .map(|(s, w)| s * C64::new(w / total, 0.0))
        .collect();
    Ok(evaluate_lhs(&LhsModel::new(d, scaled)?, d)?)
}

fn sr(cli: &Cli, args: &SrArgs) -> Result<u8, Failure> {
    let options = SolverOptions {
        feas_tol: cli.tol_feas,
        gap_tol: cli.tol_gap,
        max_iterations: args.max_iterations,
        ..SolverOptions::default()
    };
    let pair = parse_pair(&args.pair)?;
    let need_d = || args.d.ok_or_else(|| fail("--d is required with a generator"));
    let result = if let Kind::Ir = args.kind {
        let d = need_d()?;
        sdp::incompatibility_robustness(&setting(d, pair)?, &options)?
    } else {
        let sigma = match (&args.assemblage, args.gen) {
            (Some(path), _) => Assemblage::from_json(&read(path)?)?,
            (None, Some(Generator::MaxentMub)) => {
                let d = need_d()?;
                steer(&DensityMatrix::pure(&max_entangled(d)?), &setting(d, pair)?)?
            }
            (None, Some(Generator::Isotropic)) => {
                let d = need_d()?;
                let v = args.v.ok_or_else(|| fail("--v is required with the isotropic generator"))?;
                check_visibility(v)?;
                steer(&isotropic_state(d, v)?, &setting(d, pair)?)?
            }
            (None, Some(Generator::LhsRandom)) => {
                let seed = cli.seed.ok_or_else(|| fail("the lhs-random generator needs --seed"))?;
                random_lhs_assemblage(need_d()?, seed)?
            }
            (None, None) => return Err(fail("pass --gen or --assemblage")),
        };
        match args.kind {
            Kind::Sr => sdp::steering_robustness(&sigma, &options)?,
            _ => sdp::consistent_steering_robustness(&sigma, &options)?,
        }
    };
    emit(cli, &robustness_json(&result, &options))?;
    Ok(match result.solution.status {
        SolveStatus::Converged => 0,
        _ => NOT_CONVERGED,
    })
}

type FlatMatrix = Vec<[f64; 2]>;

fn flat(m: &ComplexMatrix) -> FlatMatrix {
    let n = m.nrows();
    (0..n * n).map(|k| [m[(k / n, k % n)].re, m[(k / n, k % n)].im]).collect()
}

#[derive(Serialize)]
struct RobustnessJson {
    kind: RobustnessKind,
    d: usize,
    value: f64,
    lower_bound: f64,
    gap: f64,
    status: SolveStatus,
    iterations: usize,
    primal_residual: f64,
    dual_residual: f64,
    dual_certificate: Option<BTreeMap<String, FlatMatrix>>,
    lhs_model: Vec<FlatMatrix>,
    meta: RobustnessMeta,
}

#[derive(Serialize)]
struct RobustnessMeta {
    feas_tol: f64,
    gap_tol: f64,
    max_iterations: usize,
    version: &'static str,
}

fn robustness_json(r: &RobustnessResult, options: &SolverOptions) -> String {
    let dual_certificate = r.functional.as_ref().map(|f| {
        let mut map = BTreeMap::new();
        for (x, row) in f.operators().iter().enumerate() {
            for (a, op) in row.iter().enumerate() {
                map.insert(format!("{}:{a}", x + 1), flat(op));
            }
        }
        map
    });
    let doc = RobustnessJson {
        kind: r.kind,
        d: r.lhs_model.dim(),
        value: r.value,
        lower_bound: r.lower_bound,
        gap: r.solution.gap,
        status: r.solution.status,
        iterations: r.solution.iterations,
        primal_residual: r.solution.primal_residual,
        dual_residual: r.solution.dual_residual,
        dual_certificate,
        lhs_model: r.lhs_model.local_states().iter().map(flat).collect(),
        meta: RobustnessMeta {
            feas_tol: options.feas_tol,
            gap_tol: options.gap_tol,
            max_iterations: options.max_iterations,
            version: env!("CARGO_PKG_VERSION"),
        },
    };
    serde_json::to_string_pretty(&doc).expect("robustness result serialises") + "\n"
}

fn threshold(cli: &Cli, args: &ThresholdArgs) -> Result<u8, Failure> {
    if args.d_min < 2 || args.d_min > args.d_max {
        return Err(fail(format!("bad dimension range {}..={}", args.d_min, args.d_max)));
    }
    if args.n_min == 0 {
        return Err(fail("--n-min must be at least 1"));
    }
    let mut out = String::from("d,n,v_star\n");
    for d in args.d_min..=args.d_max {
        let top = args.n_max.unwrap_or(d).min(d);
        for n in args.n_min..=top {
            out.push_str(&format!("{d},{n},{}\n", critical_visibility(d, n)?));
        }
    }
    emit(cli, &out)?;
    Ok(0)
}
