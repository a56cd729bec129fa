//! Command layer for `leastdiff`: study-table analysis and the simulation
//! benchmarks, with their file formats.

pub mod analyze;
pub mod error;
pub mod format;
pub mod input;
pub mod spec;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use leastdiff::Scale;

pub use analyze::{analyze, AnalysisReport, AnalysisRow, AnalyzeOptions, RowStatus};
pub use error::{CliError, CliResult};
pub use input::read_studies;
pub use spec::{CorrelateSpec, Overrides, RiskSpec};

pub const DEFAULT_ANALYZE_DRAWS: usize = 10_000;

#[derive(Debug, Parser)]
#[command(name = "leastdiff", version, about = "Least-difference effect strength for two-sample studies")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Candidate statistics and practical significance for a study table.
    Analyze(AnalyzeArgs),
    /// Comparison-error rates of candidate statistics.
    Risk(SimArgs),
    /// Spearman correlation of candidate statistics with effect-strength series.
    Correlate(SimArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScaleArg {
    Raw,
    Relative,
}

impl From<ScaleArg> for Scale {
    fn from(s: ScaleArg) -> Self {
        match s {
            ScaleArg::Raw => Scale::Raw,
            ScaleArg::Relative => Scale::Relative,
        }
    }
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Study table CSV.
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "relative")]
    pub scale: ScaleArg,
    /// Lower threshold of the null region; mirrors --pos-threshold if omitted.
    #[arg(long, allow_hyphen_values = true)]
    pub neg_threshold: Option<f64>,
    /// Upper threshold of the null region; mirrors --neg-threshold if omitted.
    #[arg(long, allow_hyphen_values = true)]
    pub pos_threshold: Option<f64>,
    /// Posterior draws per study.
    #[arg(long, default_value_t = DEFAULT_ANALYZE_DRAWS)]
    pub draws: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    #[arg(long)]
    pub out_csv: Option<PathBuf>,
    #[arg(long)]
    pub out_json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimArgs {
    /// Study spec TOML.
    pub spec: PathBuf,
    /// Use the full-scale counts instead of the desk-scale defaults.
    #[arg(long)]
    pub full_scale: bool,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub draws: Option<usize>,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    /// Output CSV; standard output if omitted.
    #[arg(long)]
    pub out_csv: Option<PathBuf>,
}

/// Runs a parsed command line on a dedicated thread pool.
pub fn run(cli: Cli) -> CliResult<()> {
    let workers = match &cli.command {
        Command::Analyze(a) => a.workers,
        Command::Risk(s) | Command::Correlate(s) => s.workers,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Other(e.to_string()))?;
    pool.install(|| match cli.command {
        Command::Analyze(args) => cmd_analyze(&args),
        Command::Risk(args) => cmd_risk(&args),
        Command::Correlate(args) => cmd_correlate(&args),
    })
}

pub fn analyze_options(args: &AnalyzeArgs) -> CliResult<AnalyzeOptions> {
    let scale: Scale = args.scale.into();
    if scale == Scale::Raw && args.neg_threshold.is_none() && args.pos_threshold.is_none() {
        return Err(CliError::Input(
            "raw scale needs --neg-threshold or --pos-threshold in measurement units".into(),
        ));
    }
    let region = spec::null_region(scale, args.neg_threshold, args.pos_threshold)?;
    if args.draws < leastdiff::MIN_DRAWS {
        return Err(CliError::Input(format!("--draws must be at least {}", leastdiff::MIN_DRAWS)));
    }
    Ok(AnalyzeOptions { scale, region, draws: args.draws, seed: args.seed })
}

/// Reads the table, analyzes it and writes the requested outputs. Input
/// errors write nothing; rows with withheld relative statistics are written
/// before the error is returned.
pub fn cmd_analyze(args: &AnalyzeArgs) -> CliResult<()> {
    let options = analyze_options(args)?;
    let file = File::open(&args.input).map_err(|e| CliError::Input(format!("{}: {e}", args.input.display())))?;
    let studies = read_studies(io::BufReader::new(file))?;
    let report = analyze(&studies, &options)?;
    if args.out_csv.is_none() && args.out_json.is_none() {
        analyze::write_csv(&report, io::stdout().lock())?;
    }
    if let Some(path) = &args.out_csv {
        analyze::write_csv(&report, create(path)?)?;
    }
    if let Some(path) = &args.out_json {
        analyze::write_json(&report, create(path)?)?;
    }
    let rows = report.nonpositive_rows();
    if options.scale == Scale::Relative && !rows.is_empty() {
        return Err(CliError::NonpositiveControl { rows });
    }
    Ok(())
}

fn overrides(args: &SimArgs) -> Overrides {
    Overrides { full_scale: args.full_scale, seed: args.seed, draws: args.draws }
}

fn read_spec(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn cmd_risk(args: &SimArgs) -> CliResult<()> {
    let spec: RiskSpec = spec::parse_spec(&read_spec(&args.spec)?)?;
    let report = spec::run_risk(&spec, &overrides(args))?;
    eprintln!(
        "mixed-sign trials skipped: {}; pair-set regenerations: {}; t-ratio KS statistic: {}",
        report.mixed_sign_trials,
        report.regenerations,
        format::g6(report.t_ratio_ks)
    );
    write_to(args.out_csv.as_deref(), |w| spec::write_risk_csv(&report, w))
}

pub fn cmd_correlate(args: &SimArgs) -> CliResult<()> {
    let spec: CorrelateSpec = spec::parse_spec(&read_spec(&args.spec)?)?;
    let report = spec::run_correlate(&spec, &overrides(args))?;
    write_to(args.out_csv.as_deref(), |w| spec::write_correlation_csv(&report, w))
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn write_to(path: Option<&Path>, write: impl FnOnce(&mut dyn Write) -> CliResult<()>) -> CliResult<()> {
    match path {
        Some(p) => write(&mut create(p)?),
        None => write(&mut io::stdout().lock()),
    }
}
