//! Command-line front end for the anyonic V² walk.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use anyon_walk::analysis::{fit_quadratic, fit_quadratic_with_offset, FitWindow};
use anyon_walk::circulant::{build_fourier_factor, evolve_circulant, ising_distribution};
use anyon_walk::exact::evolve;
use anyon_walk::moments::{kappas, oracle_moment, TableProvider};
use anyon_walk::reference::{classical_rw_trace, hadamard_qw_trace, DisorderConfig, DisorderEnsemble, Occupation};
use anyon_walk::{AnyonModel, Distribution, Level, MomentFamily, MomentMode, OffsetMoments, WalkTrace};

use output::{g12, read_csv, write_atomic, CsvFile};

/// Agreement required between oracle and table moments.
const TABLE_TOLERANCE: f64 = 1e-10;

#[derive(Parser)]
#[command(name = "anyon-walk", version, about = "Two-step quantum walks of SU(2)_k anyons")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one walk and write variance.csv and dist_t<t>.csv.
    Simulate(SimulateArgs),
    /// Run one walk per level and write a combined variance table.
    Sweep(SweepArgs),
    /// Compare closed-form moments against the bracket oracle.
    VerifyTable(VerifyArgs),
    /// Fit σ² = K₂t² + K₃t to a variance CSV.
    Fit(FitArgs),
    /// Print every braid moment of one level as JSON.
    DumpMoments(DumpArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Mode {
    Exact,
    Circulant,
    ClosedForm,
    Rw,
    Qw,
    Disorder,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum MomentModeArg {
    Finite,
    Asymptotic,
}

fn parse_level(s: &str) -> std::result::Result<Level, String> {
    s.parse::<Level>().map_err(|e| e.to_string())
}

#[derive(Args, Clone, Serialize)]
struct WalkArgs {
    /// Level k of SU(2)_k, or `inf`.
    #[arg(long, value_parser = parse_level)]
    #[serde(serialize_with = "ser_level")]
    level: Option<Level>,
    /// Superoperator iterations t (two walk steps each).
    #[arg(long)]
    steps: usize,
    /// Starting site s₀.
    #[arg(long, default_value_t = 0)]
    origin: i64,
    /// Ring size N; defaults to 4t+1.
    #[arg(long)]
    ring: Option<usize>,
    /// Averaged moments over the ring, or their disjoint-link limit.
    #[arg(long, value_enum, default_value_t = MomentModeArg::Asymptotic)]
    moment_mode: MomentModeArg,
    /// Added to the normalization spectrum when it is singular.
    #[arg(long)]
    regularize: Option<f64>,
    /// Abelian exchange phase φ for disorder runs, in radians.
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2)]
    phase: f64,
    /// Probability that an island holds an anyon.
    #[arg(long, default_value_t = 0.5)]
    fill_p: f64,
    /// Number of disorder seeds.
    #[arg(long, default_value_t = 32)]
    seeds: usize,
    /// First disorder seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn ser_level<S: serde::Serializer>(level: &Option<Level>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match level {
        Some(l) => s.serialize_str(&l.to_string()),
        None => s.serialize_none(),
    }
}

#[derive(Args, Serialize)]
struct SimulateArgs {
    #[arg(long, value_enum)]
    mode: Mode,
    #[command(flatten)]
    #[serde(flatten)]
    walk: WalkArgs,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Extra iterations for which dist_t<t>.csv is written.
    #[arg(long, value_delimiter = ',')]
    dist_times: Vec<usize>,
    /// Write every iteration's distribution (t,s,shat,p) to this file.
    #[arg(long)]
    emit_distributions: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct SweepArgs {
    /// Comma-separated levels, e.g. 1,2,3,5,inf.
    #[arg(long, value_delimiter = ',', required = true, value_parser = parse_level)]
    #[serde(serialize_with = "ser_levels")]
    levels: Vec<Level>,
    #[arg(long)]
    steps: usize,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    mode: Mode,
    #[arg(long, value_enum, default_value_t = MomentModeArg::Asymptotic)]
    moment_mode: MomentModeArg,
    #[arg(long)]
    regularize: Option<f64>,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

fn ser_levels<S: serde::Serializer>(levels: &[Level], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(levels.iter().map(|l| l.to_string()))
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5,10", value_parser = parse_level)]
    levels: Vec<Level>,
    /// Largest |Δ| compared.
    #[arg(long, default_value_t = 6)]
    reach: i64,
}

#[derive(Args)]
struct FitArgs {
    #[arg(long)]
    input: PathBuf,
    /// Abscissa range `a:b`, inclusive; either end may be left open.
    #[arg(long, default_value = ":")]
    window: String,
    /// Also fit a constant term.
    #[arg(long)]
    with_offset: bool,
    /// Abscissa: iterations `t` or walk steps `tau = 2t`.
    #[arg(long, value_enum, default_value_t = Axis::T)]
    x: Axis,
    /// Variance column.
    #[arg(long, default_value = "sigma2_scaled")]
    y: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum Axis {
    T,
    Tau,
}

#[derive(Args)]
struct DumpArgs {
    #[arg(long, value_parser = parse_level)]
    level: Level,
    #[arg(long, default_value_t = 6)]
    reach: i64,
    /// Write to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Errors that map to exit code 2.
#[derive(Debug)]
struct ConfigError(String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn config_error(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<ConfigError>().is_some() {
        return 2;
    }
    match err.downcast_ref::<anyon_walk::Error>() {
        Some(
            anyon_walk::Error::InvalidLevel(_)
            | anyon_walk::Error::InvalidConfig(_)
            | anyon_walk::Error::RingTooSmall { .. }
            | anyon_walk::Error::SiteOutOfRange { .. }
            | anyon_walk::Error::DegenerateWindow { .. }
            | anyon_walk::Error::LetterBudget { .. }
            | anyon_walk::Error::GeneratorOutOfRange { .. },
        ) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(args) => simulate(&args),
        Command::Sweep(args) => sweep(&args),
        Command::VerifyTable(args) => verify_table(&args),
        Command::Fit(args) => fit(&args),
        Command::DumpMoments(args) => dump_moments(&args),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn require_level(level: Option<Level>, mode: Mode) -> Result<Level> {
    level.ok_or_else(|| config_error(format!("--level is required for mode {mode:?}")))
}

fn model(level: Level) -> Result<AnyonModel<f64>> {
    Ok(AnyonModel::new(level)?)
}

/// Runs one walk; returns the trace and, for disorder, per-seed traces.
fn run_walk(mode: Mode, walk: &WalkArgs) -> Result<(WalkTrace<f64>, Vec<(u64, WalkTrace<f64>)>)> {
    let steps = walk.steps;
    let trace = match mode {
        Mode::Exact => {
            let m = model(require_level(walk.level, mode)?)?;
            evolve(walk.origin, steps, &TableProvider::new(&m), walk.ring)?
        }
        Mode::Circulant => {
            let m = model(require_level(walk.level, mode)?)?;
            let n = walk.ring.unwrap_or(4 * steps + 1);
            let moment_mode = match walk.moment_mode {
                MomentModeArg::Finite => MomentMode::FiniteN(n),
                MomentModeArg::Asymptotic => MomentMode::Asymptotic,
            };
            let factor = build_fourier_factor(&m, n, moment_mode, walk.regularize)?;
            evolve_circulant(walk.origin, steps, &factor)?
        }
        Mode::ClosedForm => {
            if let Some(level) = walk.level.filter(|&l| l != Level::Finite(2)) {
                return Err(config_error(format!("the closed form exists for k=2 only, got {level}")));
            }
            let mut trace = WalkTrace::new(walk.origin, None);
            for t in 0..=steps {
                trace.push(t, ising_distribution(t))?;
            }
            trace
        }
        Mode::Rw => classical_rw_trace(steps)?,
        Mode::Qw => hadamard_qw_trace(steps)?,
        Mode::Disorder => {
            let config = DisorderConfig { phase: walk.phase, occupation: Occupation::Bernoulli(walk.fill_p), seed: walk.seed };
            config.validate()?;
            let ensemble = DisorderEnsemble::run(walk.origin, steps, &config, walk.seeds)?;
            let mut mean = ensemble.mean_trace()?;
            // Report the seed average of the per-seed variances.
            for (point, v) in mean.points.iter_mut().zip(ensemble.mean_raw_variance()) {
                point.sigma2_raw = v;
                point.sigma2_scaled = v / 4.0;
            }
            let runs = ensemble.seeds.iter().copied().zip(ensemble.runs).collect();
            return Ok((mean, runs));
        }
    };
    Ok((trace, Vec::new()))
}

fn variance_rows(csv: &mut CsvFile, trace: &WalkTrace<f64>, prefix: &[String]) {
    for p in &trace.points {
        let mut row = prefix.to_vec();
        row.extend([p.t.to_string(), g12(p.sigma2_scaled), g12(p.sigma2_raw)]);
        csv.row(&row);
    }
}

fn distribution_rows(csv: &mut CsvFile, origin: i64, dist: &Distribution<f64>, prefix: &[String]) {
    for (u, p) in dist.iter() {
        let mut row = prefix.to_vec();
        row.extend([(origin + u).to_string(), g12(u as f64 / 2.0), g12(p)]);
        csv.row(&row);
    }
}

fn simulate(args: &SimulateArgs) -> Result<ExitCode> {
    let walk = &args.walk;
    if walk.seeds == 0 {
        return Err(config_error("--seeds must be positive"));
    }
    if let Some(eps) = walk.regularize {
        if !(eps >= 0.0) {
            return Err(config_error("--regularize must be nonnegative"));
        }
    }
    let (trace, runs) = run_walk(args.mode, walk)?;

    let mut variance = CsvFile::new(args, &["t", "sigma2_scaled", "sigma2_raw"])?;
    variance_rows(&mut variance, &trace, &[]);
    variance.write(&args.out_dir.join("variance.csv"))?;

    let mut times = args.dist_times.clone();
    times.push(walk.steps);
    times.sort_unstable();
    times.dedup();
    for t in times {
        let point = trace.at(t).ok_or_else(|| config_error(format!("iteration {t} is beyond --steps")))?;
        let mut dist = CsvFile::new(args, &["s", "shat", "p"])?;
        distribution_rows(&mut dist, trace.origin, &point.distribution, &[]);
        dist.write(&args.out_dir.join(format!("dist_t{t}.csv")))?;
    }

    if let Some(path) = &args.emit_distributions {
        let mut all = CsvFile::new(args, &["t", "s", "shat", "p"])?;
        for p in &trace.points {
            distribution_rows(&mut all, trace.origin, &p.distribution, &[p.t.to_string()]);
        }
        all.write(path)?;
    }

    if !runs.is_empty() {
        let mut per_seed = CsvFile::new(args, &["seed", "t", "sigma2_scaled", "sigma2_raw"])?;
        for (seed, run) in &runs {
            variance_rows(&mut per_seed, run, &[seed.to_string()]);
        }
        per_seed.write(&args.out_dir.join("variance_seeds.csv"))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn sweep(args: &SweepArgs) -> Result<ExitCode> {
    if args.levels.is_empty() {
        return Err(config_error("--levels must name at least one level"));
    }
    if !matches!(args.mode, Mode::Exact | Mode::Circulant) {
        return Err(config_error("sweep supports --mode exact or circulant"));
    }
    let traces = args
        .levels
        .par_iter()
        .map(|&level| {
            let walk = WalkArgs {
                level: Some(level),
                steps: args.steps,
                origin: 0,
                ring: None,
                moment_mode: args.moment_mode,
                regularize: args.regularize,
                phase: 0.0,
                fill_p: 0.0,
                seeds: 1,
                seed: 0,
            };
            let trace = run_walk(args.mode, &walk)?.0;
            let mut csv = CsvFile::new(&(args, level.to_string()), &["t", "sigma2_scaled", "sigma2_raw"])?;
            variance_rows(&mut csv, &trace, &[]);
            csv.write(&args.out_dir.join(format!("variance_k{level}.csv")))?;
            Ok((level, trace))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut combined = CsvFile::new(args, &["level", "t", "sigma2_scaled", "sigma2_raw"])?;
    for (level, trace) in &traces {
        variance_rows(&mut combined, trace, &[level.to_string()]);
    }
    combined.write(&args.out_dir.join("sweep.csv"))?;
    Ok(ExitCode::SUCCESS)
}

fn verify_table(args: &VerifyArgs) -> Result<ExitCode> {
    if args.levels.is_empty() {
        return Err(config_error("--levels must name at least one level"));
    }
    println!("family,delta,k,oracle_re,oracle_im,table_re,table_im,abs_diff");
    let mut worst: f64 = 0.0;
    for &level in &args.levels {
        let m = model(level)?;
        let table = TableProvider::new(&m);
        for family in MomentFamily::ALL {
            for delta in -args.reach..=args.reach {
                let oracle = oracle_moment(family, delta, &m)?;
                let closed = table.at_offset(family, delta);
                let diff = (oracle - closed).norm();
                worst = worst.max(diff);
                println!(
                    "{family},{delta},{level},{},{},{},{},{}",
                    g12(oracle.re),
                    g12(oracle.im),
                    g12(closed.re),
                    g12(closed.im),
                    g12(diff)
                );
            }
        }
    }
    eprintln!("max |oracle - table| = {worst:e}");
    Ok(if worst <= TABLE_TOLERANCE { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

#[derive(Serialize)]
struct FitReport {
    #[serde(rename = "K2")]
    k2: f64,
    #[serde(rename = "K3")]
    k3: f64,
    #[serde(rename = "K0", skip_serializing_if = "Option::is_none")]
    k0: Option<f64>,
    residual: f64,
    window: [Option<f64>; 2],
    points: usize,
    x: &'static str,
    y: String,
}

fn fit(args: &FitArgs) -> Result<ExitCode> {
    let window: FitWindow = args.window.parse().map_err(|e: anyon_walk::Error| config_error(e.to_string()))?;
    let (columns, rows) = read_csv(&args.input).map_err(|e| config_error(format!("{e:#}")))?;
    let col = |name: &str| -> Result<usize> {
        columns.iter().position(|c| c == name).ok_or_else(|| config_error(format!("no column `{name}` in input")))
    };
    let (xi, yi) = (col("t")?, col(&args.y)?);
    let scale = match args.x {
        Axis::T => 1.0,
        Axis::Tau => 2.0,
    };
    let series: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| match (r.get(xi), r.get(yi)) {
            (Some(&x), Some(&y)) => Ok((scale * x, y)),
            _ => bail!("short row in input"),
        })
        .collect::<Result<_>>()?;
    let result = if args.with_offset { fit_quadratic_with_offset(&series, window) } else { fit_quadratic(&series, window) };
    let f = result?;
    let finite = |v: f64| v.is_finite().then_some(v);
    let report = FitReport {
        k2: f.k2,
        k3: f.k3,
        k0: f.offset,
        residual: f.residual,
        window: [finite(f.window.start), finite(f.window.end)],
        points: f.points,
        x: match args.x {
            Axis::T => "t",
            Axis::Tau => "tau",
        },
        y: args.y.clone(),
    };
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct Complex {
    re: f64,
    im: f64,
}

impl From<anyon_walk::scalar::C<f64>> for Complex {
    fn from(z: anyon_walk::scalar::C<f64>) -> Self {
        Complex { re: z.re, im: z.im }
    }
}

#[derive(Serialize)]
struct MomentRow {
    family: String,
    delta: i64,
    value: Complex,
}

#[derive(Serialize)]
struct MomentDump {
    version: &'static str,
    level: String,
    a: Complex,
    d: f64,
    disjoint: Vec<(String, Complex)>,
    moments: Vec<MomentRow>,
    kappa1: f64,
    kappa2: Complex,
}

fn dump_moments(args: &DumpArgs) -> Result<ExitCode> {
    if args.reach < 0 {
        return Err(config_error("--reach must be nonnegative"));
    }
    let m = model(args.level)?;
    let table = TableProvider::new(&m);
    let k = kappas(&m, MomentMode::Asymptotic)?;
    let dump = MomentDump {
        version: env!("CARGO_PKG_VERSION"),
        level: args.level.to_string(),
        a: m.a().into(),
        d: m.d(),
        disjoint: MomentFamily::ALL.iter().map(|&f| (f.to_string(), table.disjoint(f).into())).collect(),
        moments: MomentFamily::ALL
            .iter()
            .flat_map(|&f| {
                let table = &table;
                (-args.reach..=args.reach).map(move |delta| MomentRow {
                    family: f.to_string(),
                    delta,
                    value: table.at_offset(f, delta).into(),
                })
            })
            .collect(),
        kappa1: k.kappa1,
        kappa2: k.kappa2.into(),
    };
    let text = serde_json::to_string_pretty(&dump)? + "\n";
    match &args.out {
        Some(path) => write_atomic(path, text.as_bytes()).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}
