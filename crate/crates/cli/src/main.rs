//! `fibnormal`: digit statistics of the concatenated Fibonacci constant.

mod commands;
mod golden;
mod report;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fibnormal_core::Error;

use report::Report;

/// Exit statuses.
const EXIT_USAGE: u8 = 2;
const EXIT_CAPACITY: u8 = 3;
const EXIT_IO: u8 = 4;
const EXIT_GOLDEN_FAILED: u8 = 1;

/// Default directory for reports when `--output` is not given.
pub const OUTPUT_DIR_VAR: &str = "FIBNORMAL_OUTPUT_DIR";

#[derive(Parser)]
#[command(name = "fibnormal", version, about = "Digit statistics of 0.F_1 F_2 F_3 ... in base b")]
#[command(args_conflicts_with_subcommands = true)]
struct Cli {
    /// Run the built-in desk-scale golden checks and exit.
    #[arg(long)]
    golden: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Stream F_1..F_N and test digit and block uniformity.
    Analyze(AnalyzeArgs),
    /// Per-term maximum deviations and their census over thresholds.
    PerTerm(PerTermArgs),
    /// Fit max|dev| ~ c * D^e on log-log axes.
    Regress(RegressArgs),
    /// Ragged array whose rows are uniform but whose columns are not normal.
    Counterexample(CounterexampleArgs),
    /// Which F_n are values of the sum-of-divisors function.
    SigmaCensus(SigmaCensusArgs),
    /// Whether a value is attained by phi, sigma and lambda.
    Reach(ReachArgs),
    /// Benford leading-digit and Pisano trailing-digit baselines.
    Baselines(BaselinesArgs),
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Text => "txt",
        }
    }
}

#[derive(Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Args)]
pub struct AnalyzeArgs {
    #[arg(long, default_value_t = 10)]
    pub base: u32,
    /// Number of terms N.
    #[arg(long, short = 'n')]
    pub terms: u64,
    #[arg(long, default_value_t = 4)]
    pub k_max: usize,
    /// Also split counts into leading/trailing/middle/boundary blocks.
    #[arg(long)]
    pub positional: bool,
    /// Stream this many contiguous ranges concurrently and merge.
    #[arg(long, default_value_t = 1)]
    pub partitions: usize,
    /// Checkpoint file; an existing one is resumed unless --fresh.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    /// Save the checkpoint after every this many terms (0: only at the end).
    #[arg(long, default_value_t = 0)]
    pub checkpoint_every: u64,
    /// Ignore an existing checkpoint file.
    #[arg(long)]
    pub fresh: bool,
    /// No progress on standard error.
    #[arg(long, short)]
    pub quiet: bool,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args)]
pub struct PerTermArgs {
    #[arg(long, default_value_t = 10)]
    pub base: u32,
    #[arg(long, short = 'n')]
    pub terms: u64,
    /// Block length of the per-term deviation.
    #[arg(long, short, default_value_t = 1)]
    pub k: usize,
    #[arg(long, value_delimiter = ',', default_values_t = fibnormal_core::diagnostics::DEFAULT_EPSILONS)]
    pub epsilons: Vec<f64>,
    /// Only terms with at least this many digits enter the census.
    #[arg(long, default_value_t = fibnormal_core::diagnostics::CENSUS_MIN_LENGTH)]
    pub min_length: u64,
    /// Only terms with at least this many digits enter the baseline ratio.
    #[arg(long, default_value_t = fibnormal_core::diagnostics::RATIO_MIN_LENGTH)]
    pub ratio_min_length: u64,
    #[arg(long, default_value_t = 1)]
    pub partitions: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args)]
pub struct RegressArgs {
    /// File of `D,dev` lines (a non-numeric header line is skipped).
    #[arg(long, conflicts_with = "point")]
    pub points: Option<PathBuf>,
    /// Inline point `D:dev`; repeat for each point.
    #[arg(long, short)]
    pub point: Vec<String>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args)]
pub struct CounterexampleArgs {
    /// Number of columns N.
    #[arg(long, short = 'n')]
    pub columns: u64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args)]
pub struct SigmaCensusArgs {
    #[arg(long, default_value_t = 40)]
    pub max_index: u64,
    /// Largest F_n searched.
    #[arg(long, default_value_t = 1_000_000_000)]
    pub cap: u64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args)]
pub struct ReachArgs {
    pub value: u64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args)]
pub struct BaselinesArgs {
    #[arg(long, default_value_t = 10)]
    pub base: u32,
    /// Also tabulate empirical leading digits of F_1..F_N.
    #[arg(long, short = 'n')]
    pub terms: Option<u64>,
    #[command(flatten)]
    pub out: OutputArgs,
}

/// A failure with its exit status.
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Capacity(_) => EXIT_CAPACITY,
            Error::Io { .. } | Error::Integrity { .. } | Error::Version { .. } => EXIT_IO,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn emit(report: &Report, out: &OutputArgs, stem: String) -> Result<(), Failure> {
    let body = match out.format {
        Format::Json => report.json(),
        Format::Csv => report.csv(),
        Format::Text => report.text(),
    };
    let path = match (&out.output, std::env::var_os(OUTPUT_DIR_VAR)) {
        (Some(p), _) => Some(p.clone()),
        (None, Some(dir)) => Some(PathBuf::from(dir).join(format!("{stem}.{}", out.format.extension()))),
        (None, None) => None,
    };
    match path {
        Some(p) => fs::write(&p, body).map_err(|e| Failure::from(Error::io(&p, e))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    if cli.golden {
        return Ok(if golden::run() { 0 } else { EXIT_GOLDEN_FAILED });
    }
    let Some(command) = cli.command else {
        return Err(Failure::usage("no command given; see --help"));
    };
    match command {
        Command::Analyze(a) => {
            let r = commands::analyze(&a)?;
            emit(&r, &a.out, format!("analyze-b{}-n{}", a.base, a.terms))?;
        }
        Command::PerTerm(a) => {
            let r = commands::per_term(&a)?;
            emit(&r, &a.out, format!("per-term-b{}-n{}-k{}", a.base, a.terms, a.k))?;
        }
        Command::Regress(a) => {
            let r = commands::regress(&a)?;
            emit(&r, &a.out, "regress".into())?;
        }
        Command::Counterexample(a) => {
            let r = commands::counterexample(&a)?;
            emit(&r, &a.out, format!("counterexample-n{}", a.columns))?;
        }
        Command::SigmaCensus(a) => {
            let r = commands::sigma_census(&a)?;
            emit(&r, &a.out, format!("sigma-census-{}", a.max_index))?;
        }
        Command::Reach(a) => {
            let r = commands::reach(&a)?;
            emit(&r, &a.out, format!("reach-{}", a.value))?;
        }
        Command::Baselines(a) => {
            let r = commands::baselines(&a)?;
            emit(&r, &a.out, format!("baselines-b{}", a.base))?;
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("fibnormal: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
