//! `lers`: sample loop-erased random surfaces, run seeded sweeps,
//! estimate the growth exponent, verify invariants, export meshes.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 validation failure,
//! 3 sampler abort (step cap).

mod obj;
mod svg;

use anyhow::{anyhow, Context};
use clap::{error::ErrorKind, Parser, Subcommand, ValueEnum};
use lers::oracle::default_cache_dir;
use lers::{
    bootstrap_ci, fit_exponent, parse_csv, records_to_csv, run_sweep, run_verify,
    size_table_from_records, summarize, ExponentEstimate, FitConvention, LatticeSize,
    LersSampler, Parallelism, SweepConfig, UstError, VerifyConfig, VerifyError,
    DEFAULT_ENUMERATION_CAP,
};
use std::path::PathBuf;
use std::process::ExitCode;

const HYPOTHESIS: f64 = 48.0 / 19.0;

#[derive(Parser)]
#[command(
    name = "lers",
    version,
    about = "Uniform spanning 2-trees and loop-erased random surfaces on [0,n]^3",
    after_help = "Environment: LERS_CACHE_DIR overrides the oracle cache directory."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw one surface and print its size and walk steps
    Sample {
        /// Lattice size n (the box is [0,n]^3)
        #[arg(long)]
        n: u32,
        /// Sample seed
        #[arg(long)]
        seed: u64,
        /// Also export the surface as a Wavefront OBJ mesh
        #[arg(long)]
        mesh: Option<PathBuf>,
    },
    /// Run a seeded sweep over lattice sizes and emit CSV
    Sweep {
        #[arg(long)]
        n_min: u32,
        #[arg(long)]
        n_max: u32,
        #[arg(long, default_value_t = 1)]
        n_step: u32,
        /// Replicates per lattice size
        #[arg(long)]
        reps: u32,
        /// Master seed; every (n, replicate) derives its own child seed
        #[arg(long)]
        seed: u64,
        /// Worker threads (default: all cores)
        #[arg(long)]
        parallel: Option<usize>,
        /// Output file (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit the growth exponent from sweep CSV, with bootstrap interval
    Estimate {
        /// Sweep CSV produced by `lers sweep`
        csv: PathBuf,
        /// Bootstrap replicates (0 skips the interval)
        #[arg(long, default_value_t = 1000)]
        bootstrap: usize,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        /// Aggregation convention for the log-log fit
        #[arg(long, value_enum, default_value_t = ConventionArg::LogOfMeans)]
        convention: ConventionArg,
        /// Bootstrap resampling seed
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Worker threads for the bootstrap (default: all cores)
        #[arg(long)]
        parallel: Option<usize>,
        /// Write a log-log whisker plot here
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Re-derive every invariant over fresh samples; n <= 12
    Verify {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        reps: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Spanning-tree enumeration cap for the exact oracle
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
        cap: u64,
        /// Significance level for the statistical checks
        #[arg(long, default_value_t = 0.01)]
        alpha: f64,
    },
    /// Sample one surface and write it as a Wavefront OBJ mesh
    ExportMesh {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ConventionArg {
    /// Regress log of the per-n mean size
    LogOfMeans,
    /// Regress the per-n mean of log sizes
    MeanOfLogs,
}

impl From<ConventionArg> for FitConvention {
    fn from(arg: ConventionArg) -> Self {
        match arg {
            ConventionArg::LogOfMeans => FitConvention::LogOfMeans,
            ConventionArg::MeanOfLogs => FitConvention::MeanOfLogs,
        }
    }
}

/// Failure classes map one-to-one onto the nonzero exit codes.
enum Failure {
    Usage(anyhow::Error),
    Validation(anyhow::Error),
    Abort(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Validation(_) => 2,
            Failure::Abort(_) => 3,
        }
    }
    fn error(&self) -> &anyhow::Error {
        match self {
            Failure::Usage(e) | Failure::Validation(e) | Failure::Abort(e) => e,
        }
    }
}

fn usage<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Usage(e.into())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {:#}", failure.error());
            ExitCode::from(failure.code())
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Sample { n, seed, mesh } => cmd_sample(n, seed, mesh),
        Command::Sweep {
            n_min,
            n_max,
            n_step,
            reps,
            seed,
            parallel,
            out,
        } => cmd_sweep(n_min, n_max, n_step, reps, seed, parallel, out),
        Command::Estimate {
            csv,
            bootstrap,
            alpha,
            convention,
            seed,
            parallel,
            svg,
        } => cmd_estimate(csv, bootstrap, alpha, convention.into(), seed, parallel, svg),
        Command::Verify {
            n,
            reps,
            seed,
            cap,
            alpha,
        } => cmd_verify(n, reps, seed, cap, alpha),
        Command::ExportMesh { n, seed, out } => cmd_export_mesh(n, seed, out),
    }
}

fn lattice_size(n: u32) -> Result<LatticeSize, Failure> {
    LatticeSize::new(n).map_err(usage)
}

fn strategy(parallel: Option<usize>) -> Result<Parallelism, Failure> {
    match parallel {
        None => Ok(Parallelism::Default),
        Some(0) => Err(usage(anyhow!("--parallel must be at least 1"))),
        Some(k) => Ok(Parallelism::Threads(k)),
    }
}

fn sample_or_abort(sampler: &LersSampler, seed: u64) -> Result<lers::LersSample, Failure> {
    sampler.sample(seed).map_err(|e: UstError| {
        Failure::Abort(anyhow!(e).context("sampler aborted"))
    })
}

fn cmd_sample(n: u32, seed: u64, mesh: Option<PathBuf>) -> Result<(), Failure> {
    let sampler = LersSampler::new(lattice_size(n)?);
    let sample = sample_or_abort(&sampler, seed)?;
    println!("n = {n}");
    println!("seed = {seed}");
    println!("M = {}", sample.size);
    println!("steps = {}", sample.steps);
    if let Some(path) = mesh {
        let contents = obj::surface_to_obj(sampler.complex(), &sample.surface);
        std::fs::write(&path, contents)
            .with_context(|| format!("writing {}", path.display()))
            .map_err(Failure::Usage)?;
        println!("mesh = {}", path.display());
    }
    Ok(())
}

fn cmd_sweep(
    n_min: u32,
    n_max: u32,
    n_step: u32,
    reps: u32,
    seed: u64,
    parallel: Option<usize>,
    out: Option<PathBuf>,
) -> Result<(), Failure> {
    let config = SweepConfig {
        n_min,
        n_max,
        n_step,
        reps,
        master_seed: seed,
        strategy: strategy(parallel)?,
    };
    let records = run_sweep(&config).map_err(usage)?;
    let csv = records_to_csv(&records);
    match out {
        Some(path) => {
            std::fs::write(&path, &csv)
                .with_context(|| format!("writing {}", path.display()))
                .map_err(Failure::Usage)?;
            eprintln!("wrote {} rows to {}", records.len(), path.display());
        }
        None => print!("{csv}"),
    }
    Ok(())
}

fn cmd_estimate(
    csv: PathBuf,
    bootstrap: usize,
    alpha: f64,
    convention: FitConvention,
    seed: u64,
    parallel: Option<usize>,
    svg_out: Option<PathBuf>,
) -> Result<(), Failure> {
    let text = std::fs::read_to_string(&csv)
        .with_context(|| format!("reading {}", csv.display()))
        .map_err(Failure::Usage)?;
    let records = parse_csv(&text)
        .with_context(|| format!("parsing {}", csv.display()))
        .map_err(Failure::Usage)?;
    let table = size_table_from_records(&records);

    let estimate: ExponentEstimate = if bootstrap == 0 {
        fit_exponent(&table, convention).map_err(usage)?
    } else {
        bootstrap_ci(&table, convention, bootstrap, alpha, seed, strategy(parallel)?)
            .map_err(usage)?
    };

    let summaries = summarize(&table);
    println!("n,count,mean,min,q1,median,q3,max");
    for s in &summaries {
        println!(
            "{},{},{:.3},{:.0},{:.1},{:.1},{:.1},{:.0}",
            s.n, s.count, s.mean, s.min, s.q1, s.median, s.q3, s.max
        );
    }
    println!("convention = {:?}", estimate.convention);
    println!("c = {:.6}", estimate.slope);
    match &estimate.bootstrap {
        Some(interval) => {
            println!(
                "{:.0}% bootstrap interval = [{:.6}, {:.6}] ({} replicates)",
                (1.0 - interval.alpha) * 100.0,
                interval.lo,
                interval.hi,
                interval.replicates
            );
            if !interval.point_inside {
                println!("note: point estimate lies outside the percentile interval");
            }
            let verdict = if HYPOTHESIS >= interval.lo && HYPOTHESIS <= interval.hi {
                "inside"
            } else {
                "outside"
            };
            println!("48/19 = {HYPOTHESIS:.6} lies {verdict} the interval");
        }
        None => println!("bootstrap skipped (0 replicates requested)"),
    }

    if let Some(path) = svg_out {
        let plot = svg::log_log_plot(&summaries, &estimate, HYPOTHESIS);
        std::fs::write(&path, plot)
            .with_context(|| format!("writing {}", path.display()))
            .map_err(Failure::Usage)?;
        println!("plot = {}", path.display());
    }
    Ok(())
}

fn cmd_verify(n: u32, reps: u32, seed: u64, cap: u64, alpha: f64) -> Result<(), Failure> {
    let config = VerifyConfig {
        n,
        reps,
        master_seed: seed,
        oracle_cap: cap,
        cache_dir: Some(default_cache_dir()),
        alpha,
    };
    let report = run_verify(&config).map_err(|e| match e {
        VerifyError::UnsupportedN { .. } | VerifyError::ZeroReps | VerifyError::BadAlpha { .. } => {
            usage(e)
        }
        VerifyError::Oracle(_) => Failure::Validation(e.into()),
    })?;
    println!("verify n={} reps={}", report.n, report.reps);
    for check in &report.checks {
        let tag = if check.passed { "pass" } else { "FAIL" };
        println!("[{tag}] {}: {}", check.name, check.detail);
    }
    if report.passed() {
        println!("all checks passed");
        Ok(())
    } else {
        let failed = report.checks.iter().filter(|c| !c.passed).count();
        Err(Failure::Validation(anyhow!("{failed} check(s) failed")))
    }
}

fn cmd_export_mesh(n: u32, seed: u64, out: PathBuf) -> Result<(), Failure> {
    let sampler = LersSampler::new(lattice_size(n)?);
    let sample = sample_or_abort(&sampler, seed)?;
    let contents = obj::surface_to_obj(sampler.complex(), &sample.surface);
    std::fs::write(&out, contents)
        .with_context(|| format!("writing {}", out.display()))
        .map_err(Failure::Usage)?;
    println!("wrote {} quads to {}", sample.size, out.display());
    Ok(())
}
