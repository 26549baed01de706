//! Command-line front end: bound and oracle sweeps written as CSV, the
//! validation suites, and source description normalization.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::bounds::{
    additive_noise_remote_bounds, awgn_remote_bounds, ceo_sum_rate_bounds, classic_rd_bounds,
    conditional_rd_bounds, gray_wyner_bounds, mmse_estimation_bounds,
    posterior_mean_reduction, raw_estimation_bounds, remote_rd_bounds, sum_distortion_rd_bounds,
    vector_rd_bounds, water_filling_rate, wyner_ziv_rd_bounds, BoundPair, CEOQuery,
    GrayWynerQuery,
};
use crate::dist::{AdditiveNoiseModel, Axis, BivariateSource, ScalarSource, Source, SourceDescription};
use crate::error::{Error, Result};
use crate::oracle::{
    conditional_rd_oracle_with, d_matrix_search, discretize, DiscretizedSource, rd_at_distortion, remote_rd_oracle_with,
    zero_rate_distortion, DistortionMatrix, JOINT_GRID, REMOTE_GRID, SEARCH_GRID,
};
use crate::validate::{self, Suite};

/// Scalar oracle grid size.
pub const DEFAULT_GRID_N: usize = 1024;
pub const DEFAULT_K_SIGMA: f64 = 8.0;
/// Side-information cells for the conditional oracle.
pub const DEFAULT_W_CELLS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Problem {
    Classic,
    Vector,
    Sum,
    Conditional,
    WynerZiv,
    Remote,
    AnRemote,
    AwgnRemote,
    GrayWyner,
    Ceo,
    Mmse,
}

#[derive(Debug, Parser)]
#[command(name = "shannon-bounds", version, about = "Shannon lower/upper bounds for quadratic rate-distortion problems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a bound pair over a grid.
    Bounds {
        #[arg(value_enum)]
        problem: Problem,
        #[command(flatten)]
        args: SweepArgs,
    },
    /// Evaluate only the numerical oracle over a grid.
    Oracle {
        #[arg(value_enum)]
        problem: Problem,
        #[command(flatten)]
        args: SweepArgs,
    },
    /// Run a validation suite over the built-in corpus.
    Validate {
        #[arg(value_enum)]
        suite: Suite,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Normalize a source description and print its functionals.
    Describe {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub source: Option<PathBuf>,
    /// Noise density for remote problems.
    #[arg(long)]
    pub source2: Option<PathBuf>,
    #[arg(long, conflicts_with = "sweep", allow_negative_numbers = true)]
    pub delta: Option<f64>,
    /// Evenly spaced distortions `lo:hi:n`.
    #[arg(long, value_parser = parse_sweep)]
    pub sweep: Option<SweepGrid>,
    #[arg(long, value_delimiter = ',')]
    pub rp: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub agents: Vec<u32>,
    #[arg(long)]
    pub noise_var: Option<f64>,
    /// Also run the matching oracle.
    #[arg(long)]
    pub oracle: bool,
    #[arg(long)]
    pub grid_n: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_K_SIGMA)]
    pub k_sigma: f64,
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Report rates in bits.
    #[arg(long)]
    pub bits: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Distortions parsed from `lo:hi:n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid(pub Vec<f64>);

fn parse_sweep(s: &str) -> std::result::Result<SweepGrid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err("expected lo:hi:n".into());
    }
    let lo: f64 = parts[0].parse().map_err(|e| format!("lo: {e}"))?;
    let hi: f64 = parts[1].parse().map_err(|e| format!("hi: {e}"))?;
    let n: usize = parts[2].parse().map_err(|e| format!("n: {e}"))?;
    if n == 0 || !(lo > 0.0) || (n > 1 && !(hi > lo)) {
        return Err("need 0 < lo < hi and n ≥ 1".into());
    }
    if n == 1 {
        return Ok(SweepGrid(vec![lo]));
    }
    Ok(SweepGrid(crate::quad::linspace(lo, hi, n)))
}

/// A fully resolved sweep.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub problem: Problem,
    pub source: Option<Source>,
    pub source2: Option<ScalarSource>,
    pub deltas: Vec<f64>,
    pub rps: Vec<f64>,
    pub agents: Vec<u32>,
    pub noise_var: Option<f64>,
    pub oracle: bool,
    pub grid_n: Option<usize>,
    pub k_sigma: f64,
}

/// One output row. Missing entries are written as empty fields.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub delta: Option<f64>,
    pub rp: Option<f64>,
    pub m: Option<u32>,
    pub bounds: Option<BoundPair>,
    pub oracle: Option<f64>,
}

impl SweepSpec {
    pub fn from_args(problem: Problem, args: &SweepArgs, oracle_only: bool) -> Result<Self> {
        let load = |p: &Path| SourceDescription::load(p)?.build();
        let source = args.source.as_deref().map(load).transpose()?;
        let source2 = match args.source2.as_deref().map(load).transpose()? {
            None => None,
            Some(Source::Scalar(s)) => Some(s),
            Some(Source::Bivariate(_)) => {
                return Err(Error::Config("--source2 must be a scalar density".into()))
            }
        };
        let deltas = match (&args.sweep, args.delta) {
            (Some(v), _) => v.0.clone(),
            (None, Some(d)) => vec![d],
            (None, None) if problem == Problem::Mmse => Vec::new(),
            (None, None) => return Err(Error::Config("need --delta or --sweep".into())),
        };
        if deltas.iter().any(|&d| !(d > 0.0)) || deltas.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("distortions must be positive and increasing".into()));
        }
        let spec = Self {
            problem,
            source,
            source2,
            deltas,
            rps: args.rp.clone(),
            agents: args.agents.clone(),
            noise_var: args.noise_var,
            oracle: args.oracle || oracle_only,
            grid_n: args.grid_n,
            k_sigma: args.k_sigma,
        };
        if spec.rps.iter().any(|&r| !(r >= 0.0)) {
            return Err(Error::Config("--rp values must be nonnegative".into()));
        }
        Ok(spec)
    }

    fn scalar(&self) -> Result<&ScalarSource> {
        match &self.source {
            Some(Source::Scalar(s)) => Ok(s),
            Some(Source::Bivariate(_)) => Err(Error::Config(format!(
                "{:?} needs a scalar --source",
                self.problem
            ))),
            None => Err(Error::Config("missing --source".into())),
        }
    }

    fn bivariate(&self) -> Result<&BivariateSource> {
        match &self.source {
            Some(Source::Bivariate(s)) => Ok(s),
            Some(Source::Scalar(_)) => Err(Error::Config(format!(
                "{:?} needs a bivariate --source",
                self.problem
            ))),
            None => Err(Error::Config("missing --source".into())),
        }
    }

    fn noise_model(&self) -> Result<AdditiveNoiseModel> {
        let noise = match (&self.source2, self.noise_var) {
            (Some(z), _) => z.clone(),
            (None, Some(v)) => ScalarSource::gaussian(0.0, v)?,
            (None, None) => return Err(Error::Config("need --source2 or --noise-var".into())),
        };
        AdditiveNoiseModel::new(self.scalar()?.clone(), noise)
    }

    fn noise_var(&self) -> Result<f64> {
        self.noise_var.ok_or_else(|| Error::Config("missing --noise-var".into()))
    }
}

fn point(delta: f64) -> Row {
    Row {
        delta: Some(delta),
        rp: None,
        m: None,
        bounds: None,
        oracle: None,
    }
}

/// Evaluates every grid point; rows come back in grid order.
pub fn run_bounds(spec: &SweepSpec, with_bounds: bool) -> Result<Vec<Row>> {
    let rows: Vec<Row> = match spec.problem {
        Problem::GrayWyner => {
            let rps = if spec.rps.is_empty() { vec![0.0] } else { spec.rps.clone() };
            spec.deltas
                .iter()
                .flat_map(|&d| rps.iter().map(move |&r| Row { rp: Some(r), ..point(d) }))
                .collect()
        }
        Problem::Ceo => {
            if spec.agents.is_empty() {
                return Err(Error::Config("ceo needs --agents".into()));
            }
            spec.deltas
                .iter()
                .flat_map(|&d| spec.agents.iter().map(move |&m| Row { m: Some(m), ..point(d) }))
                .collect()
        }
        Problem::Mmse => vec![Row {
            delta: None,
            ..point(0.0)
        }],
        _ => spec.deltas.iter().map(|&d| point(d)).collect(),
    };
    let ctx = Context::new(spec)?;
    rows.into_par_iter()
        .map(|mut row| {
            if with_bounds {
                row.bounds = Some(ctx.bounds(spec, &row)?);
            }
            if spec.oracle {
                row.oracle = ctx.oracle(spec, &row)?;
            }
            Ok(row)
        })
        .collect()
}

/// Delta-independent work shared by the rows of a sweep.
struct Context {
    reduction: Option<crate::bounds::RemoteReduction>,
    /// Discretized scalar source and its zero-rate distortion.
    discretized: Option<(DiscretizedSource, f64)>,
}

impl Context {
    fn new(spec: &SweepSpec) -> Result<Self> {
        let reduction = match spec.problem {
            Problem::Remote => Some(posterior_mean_reduction(&spec.noise_model()?)?),
            _ => None,
        };
        let discretized = match (spec.problem, spec.oracle) {
            (Problem::Classic, true) => {
                let d = discretize(spec.scalar()?, spec.grid_n.unwrap_or(DEFAULT_GRID_N), spec.k_sigma)?;
                let m = DistortionMatrix::squared_error(d.points(), d.points());
                let dmax = zero_rate_distortion(d.pmf(), &m);
                Some((d, dmax))
            }
            _ => None,
        };
        Ok(Self { reduction, discretized })
    }

    fn bounds(&self, spec: &SweepSpec, row: &Row) -> Result<BoundPair> {
        let delta = row.delta.unwrap_or(f64::NAN);
        match spec.problem {
            Problem::Classic => classic_rd_bounds(spec.scalar()?, delta),
            Problem::Vector => vector_rd_bounds(spec.bivariate()?, delta, delta),
            Problem::Sum => sum_distortion_rd_bounds(spec.bivariate()?, delta),
            Problem::Conditional => conditional_rd_bounds(spec.bivariate()?, delta),
            Problem::WynerZiv => wyner_ziv_rd_bounds(spec.bivariate()?, delta),
            Problem::Remote => remote_rd_bounds(self.reduction.as_ref().expect("built for remote"), delta),
            Problem::AnRemote => additive_noise_remote_bounds(&spec.noise_model()?, delta),
            Problem::AwgnRemote => awgn_remote_bounds(spec.scalar()?, spec.noise_var()?, delta),
            Problem::GrayWyner => gray_wyner_bounds(&GrayWynerQuery::new(
                spec.bivariate()?.clone(),
                delta,
                row.rp.unwrap_or(0.0),
            )?),
            Problem::Ceo => ceo_sum_rate_bounds(&CEOQuery {
                signal: spec.scalar()?.clone(),
                noise_variance: spec.noise_var()?,
                agents: row.m.unwrap_or(1),
                delta,
            }),
            Problem::Mmse => match &spec.source {
                Some(Source::Bivariate(b)) => raw_estimation_bounds(b),
                _ => mmse_estimation_bounds(&spec.noise_model()?),
            },
        }
    }

    /// The matching oracle, or `None` where there is none.
    fn oracle(&self, spec: &SweepSpec, row: &Row) -> Result<Option<f64>> {
        let delta = row.delta.unwrap_or(f64::NAN);
        let n = spec.grid_n;
        Ok(Some(match spec.problem {
            Problem::Classic => {
                let (d, dmax) = self.discretized.as_ref().expect("built for classic oracles");
                if delta >= *dmax {
                    0.0
                } else {
                    rd_at_distortion(d, delta)?.rate
                }
            }
            Problem::Vector => {
                let sigma = spec.bivariate()?.covariance();
                let (det, _) = d_matrix_search(sigma, delta, delta, n.unwrap_or(SEARCH_GRID))?;
                0.5 * crate::bounds::log_plus(sigma.det() / det)
            }
            Problem::Sum => water_filling_rate(spec.bivariate()?.covariance(), delta),
            Problem::Conditional => {
                conditional_rd_oracle_with(spec.bivariate()?, delta, DEFAULT_W_CELLS, n.unwrap_or(JOINT_GRID))?.rate
            }
            Problem::Remote | Problem::AnRemote | Problem::AwgnRemote => {
                let model = match spec.problem {
                    Problem::AwgnRemote => AdditiveNoiseModel::new(
                        spec.scalar()?.clone(),
                        ScalarSource::gaussian(0.0, spec.noise_var()?)?,
                    )?,
                    _ => spec.noise_model()?,
                };
                remote_rd_oracle_with(&model, delta, n.unwrap_or(REMOTE_GRID), spec.k_sigma)?.rate
            }
            Problem::Mmse => match &spec.source {
                Some(Source::Bivariate(b)) => b.mmse(Axis::First, Axis::Second)?,
                _ => posterior_mean_reduction(&spec.noise_model()?)?.delta0(),
            },
            Problem::WynerZiv | Problem::GrayWyner | Problem::Ceo => return Ok(None),
        }))
    }
}

/// Writes rows as CSV. Rates are scaled by `1/ln 2` when `bits` is set;
/// MMSE rows are distortions and never scaled.
pub fn write_csv<W: Write>(out: &mut W, rows: &[Row], problem: Problem, bits: bool) -> std::io::Result<()> {
    let unit = if bits { "bits" } else { "nats" };
    let scale = if bits && problem != Problem::Mmse { 1.0 / std::f64::consts::LN_2 } else { 1.0 };
    writeln!(
        out,
        "delta,rp,m,lower_{unit},upper_{unit},lower_valid,upper_valid,gap_{unit},regime,oracle_{unit}"
    )?;
    let num = |v: Option<f64>| v.filter(|x| x.is_finite()).map_or(String::new(), |x| x.to_string());
    for r in rows {
        let b = r.bounds.map(|b| b.scaled(scale));
        let fields = [
            num(r.delta),
            num(r.rp),
            r.m.map_or(String::new(), |m| m.to_string()),
            num(b.filter(|b| b.lower_valid).map(|b| b.lower)),
            num(b.filter(|b| b.upper_valid).map(|b| b.upper)),
            b.map_or(String::new(), |b| b.lower_valid.to_string()),
            b.map_or(String::new(), |b| b.upper_valid.to_string()),
            num(b.and_then(|b| b.gap())),
            b.and_then(|b| b.regime).map_or(String::new(), |g| g.to_string()),
            num(r.oracle.map(|v| v * scale)),
        ];
        writeln!(out, "{}", fields.join(","))?;
    }
    Ok(())
}

/// Process exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::InvalidSource(_) | Error::Io(_) => 2,
        Error::NumericalFailure { .. } | Error::Discretization { .. } | Error::InvalidCertificate { .. } => 4,
        _ => 3,
    }
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(std::io::BufWriter::new(
            std::fs::File::create(p).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

fn describe(file: &Path, out: Option<&Path>) -> Result<()> {
    let desc = SourceDescription::load(file)?;
    let source = desc.build()?;
    let mut w = open_out(out)?;
    let io = |e: std::io::Error| Error::Config(format!("write: {e}"));
    writeln!(w, "{}", SourceDescription::from(&source).to_json()).map_err(io)?;
    match &source {
        Source::Scalar(s) => {
            eprintln!("mean {}", s.mean());
            eprintln!("variance {}", s.variance()?);
            eprintln!("entropy_nats {}", s.differential_entropy()?);
            eprintln!("entropy_power {}", s.entropy_power()?);
            eprintln!("kl_to_gaussian {}", s.kl_to_gaussian()?);
        }
        Source::Bivariate(b) => {
            let c = b.covariance();
            eprintln!("covariance [[{}, {}], [{}, {}]]", c.s11, c.s12, c.s12, c.s22);
            eprintln!("joint_entropy_nats {}", b.joint_entropy()?);
            eprintln!("joint_entropy_power {}", b.joint_entropy_power()?);
            eprintln!("mmse_first_given_second {}", b.mmse(Axis::First, Axis::Second)?);
        }
    }
    Ok(())
}

fn sweep(problem: Problem, args: &SweepArgs, oracle_only: bool) -> Result<()> {
    if oracle_only && matches!(problem, Problem::WynerZiv | Problem::GrayWyner | Problem::Ceo) {
        return Err(Error::Config(format!(
            "no numerical oracle for {}",
            problem.to_possible_value().expect("no skipped variants").get_name()
        )));
    }
    let spec = SweepSpec::from_args(problem, args, oracle_only)?;
    let rows = with_jobs(args.jobs, || run_bounds(&spec, !oracle_only))??;
    let mut w = open_out(args.out.as_deref())?;
    write_csv(&mut w, &rows, problem, args.bits)
        .and_then(|_| w.flush())
        .map_err(|e| Error::Io(e.to_string()))
}

/// Parses arguments and runs; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match &cli.command {
        Command::Bounds { problem, args } => sweep(*problem, args, false),
        Command::Oracle { problem, args } => sweep(*problem, args, true),
        Command::Describe { file, out } => describe(file, out.as_deref()),
        Command::Validate { suite, jobs } => {
            return match with_jobs(*jobs, || validate::run_suite(*suite, &mut std::io::stdout())) {
                Ok(Ok(true)) => 0,
                Ok(Ok(false)) => 1,
                Ok(Err(e)) | Err(e) => {
                    eprintln!("error: {e}");
                    exit_code(&e)
                }
            };
        }
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
