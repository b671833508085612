//! Command-line interface.
//!
//! Five subcommands, all deterministic given identical inputs, flags,
//! and seeds:
//!
//! - `analyze`: campaign file/directory in, audit-ready JSON report out.
//! - `extrapolate`: plot-ready CSV curve (`m_star,s_pred,u_pred`) out.
//! - `stoprule`: minimal extra-testing budget for a risk threshold.
//! - `simulate`: synthetic campaign plus ground-truth sidecar files.
//! - `turningpoint`: flakiness diagnosis of a numeric discovery series.
//!
//! JSON outputs are [`ReportEnvelope`]s (tool version, command echo,
//! input digest, assumptions block); the schema ships with the
//! repository as `report.schema.json`.
//!
//! Exit codes: 0 success, 1 internal error (for example an output write
//! failure), 2 usage or input error (unparseable flags, malformed or
//! empty campaigns, invalid thresholds). The `simulate` subcommand reads
//! `FUZZ_ASSURE_SEED` as its seed default so CI can pin determinism
//! without threading flags through scripts.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::estimators::{extrapolation_curve, full_report, stop_rule, EstimateError};
use crate::flakiness::{turning_point_test, FlakinessError};
use crate::ingest::{snapshot_from_path, Format, IngestOptions, ParseError};
use crate::report::{
    digest_path, AnalysisResults, ReportEnvelope, ResultsPayload, SimulationResults,
    StopRuleResults, TurningPointResults,
};
use crate::simulator::{
    build_model, simulate, Distribution, GroundTruthModel, Mode, ModelError, TruthPoint,
};

/// Everything that can go wrong after argument parsing.
#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Estimate(#[from] EstimateError),
    #[error("{0}")]
    Flakiness(#[from] FlakinessError),
    #[error("{0}")]
    Model(#[from] ModelError),
    #[error("{path}: line {line}: not a number: {content:?}")]
    BadNumber {
        path: String,
        line: u64,
        content: String,
    },
    #[error("invalid significance level alpha={alpha}; must satisfy 0 < alpha < 1")]
    BadAlpha { alpha: f64 },
    /// Reading the input for digesting or parsing.
    #[error("{path}: {source}")]
    Input {
        path: String,
        #[source]
        source: std::io::Error,
    },
    /// Writing an output file or stream: not the user's fault.
    #[error("writing {path}: {source}")]
    Output {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// 2 for usage/input problems, 1 for internal failures.
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Output { .. } => 1,
            _ => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "fuzz-assure",
    version,
    about = "Statistical assurance for fuzzing campaigns: residual risk, discovery \
             extrapolation, stop rules, and flakiness diagnosis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Estimate residual risk, richness, and coverage from a campaign.
    Analyze(AnalyzeArgs),
    /// Emit a joint species/risk extrapolation curve as CSV.
    Extrapolate(ExtrapolateArgs),
    /// Compute the minimal extra-testing budget for a risk threshold.
    Stoprule(StopruleArgs),
    /// Draw a synthetic campaign from a known ground-truth model.
    Simulate(SimulateArgs),
    /// Run the turning point test on a numeric discovery series.
    Turningpoint(TurningpointArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    /// Detect from the path: directory, .csv, else JSONL.
    Auto,
    Jsonl,
    Csv,
    ShowmapDir,
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Campaign file (JSONL or CSV) or coverage-map directory.
    input: PathBuf,
    /// Input format.
    #[arg(long, value_enum, default_value_t = FormatArg::Auto)]
    format: FormatArg,
    /// Prefix prepended verbatim to every species id (namespacing).
    #[arg(long)]
    species_prefix: Option<String>,
    /// Keep only species whose final id starts with this prefix.
    #[arg(long)]
    species_filter: Option<String>,
    /// Tolerate malformed records, counting instead of failing.
    #[arg(long)]
    skip_bad_records: bool,
    /// CSV field delimiter.
    #[arg(long, default_value_t = ',')]
    delimiter: char,
    /// CSV input-id column name.
    #[arg(long, default_value = "input_id")]
    csv_input_column: String,
    /// CSV species-id column name.
    #[arg(long, default_value = "species_id")]
    csv_species_column: String,
    /// Declare the campaign feedback-driven: adaptive input generation
    /// violates the independence assumption, and the report will say so.
    #[arg(long)]
    feedback_driven: bool,
}

impl InputArgs {
    fn options(&self) -> IngestOptions {
        IngestOptions {
            species_prefix: self.species_prefix.clone(),
            species_filter: self.species_filter.clone(),
            skip_bad_records: self.skip_bad_records,
            delimiter: self.delimiter,
            input_column: self.csv_input_column.clone(),
            species_column: self.csv_species_column.clone(),
        }
    }

    fn format(&self) -> Option<Format> {
        match self.format {
            FormatArg::Auto => None,
            FormatArg::Jsonl => Some(Format::Jsonl),
            FormatArg::Csv => Some(Format::Csv),
            FormatArg::ShowmapDir => Some(Format::ShowmapDir),
        }
    }

    fn digest(&self) -> Result<String, CliError> {
        digest_path(&self.input).map_err(|source| CliError::Input {
            path: self.input.display().to_string(),
            source,
        })
    }
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    input: InputArgs,
}

#[derive(Debug, Args)]
struct ExtrapolateArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Largest additional-input horizon to extrapolate to.
    #[arg(long)]
    horizon: u64,
    /// Number of grid points on the curve.
    #[arg(long, default_value_t = 20)]
    steps: u64,
}

#[derive(Debug, Args)]
struct StopruleArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Residual-risk threshold theta, strictly between 0 and 1.
    #[arg(long)]
    risk: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DistArg {
    Uniform,
    Zipf,
    Geometric,
    Endemic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Abundance,
    Incidence,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// True species count of the model.
    #[arg(long)]
    species: u64,
    /// Abundance shape.
    #[arg(long, value_enum, default_value_t = DistArg::Uniform)]
    dist: DistArg,
    /// Zipf exponent (with --dist zipf).
    #[arg(long, default_value_t = 1.0)]
    zipf_alpha: f64,
    /// Geometric decay ratio (with --dist geometric).
    #[arg(long, default_value_t = 0.5)]
    ratio: f64,
    /// Probability mass of the core species (with --dist endemic).
    #[arg(long, default_value_t = 0.9)]
    core_mass: f64,
    /// Number of rare island species (with --dist endemic).
    #[arg(long, default_value_t = 1)]
    islands: u64,
    /// Sampling mode.
    #[arg(long, value_enum, default_value_t = ModeArg::Abundance)]
    mode: ModeArg,
    /// Number of inputs to simulate.
    #[arg(long)]
    tests: u64,
    /// RNG seed; falls back to FUZZ_ASSURE_SEED, then 0.
    #[arg(long, env = "FUZZ_ASSURE_SEED", default_value_t = 0)]
    seed: u64,
    /// Path for the JSONL campaign; the truth sidecar lands next to it
    /// with extension .truth.json.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct TurningpointArgs {
    /// File of numeric values, one per line.
    input: PathBuf,
    /// Significance level for the IID decision.
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
}

/// Runs the CLI against the given argument vector (including the binary
/// name) and returns the process exit code.
pub fn run<I, T>(argv: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<String>,
{
    let args: Vec<String> = argv.into_iter().map(Into::into).collect();
    let echo = args.get(1..).unwrap_or_default().join(" ");
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Analyze(a) => cmd_analyze(&a, &echo),
        Command::Extrapolate(a) => cmd_extrapolate(&a),
        Command::Stoprule(a) => cmd_stoprule(&a, &echo),
        Command::Simulate(a) => cmd_simulate(&a, &echo),
        Command::Turningpoint(a) => cmd_turningpoint(&a, &echo),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

fn print_stdout(text: &str) -> Result<(), CliError> {
    std::io::stdout()
        .write_all(text.as_bytes())
        .map_err(|source| CliError::Output {
            path: "<stdout>".to_string(),
            source,
        })
}

fn cmd_analyze(args: &AnalyzeArgs, echo: &str) -> Result<(), CliError> {
    let digest = args.input.digest()?;
    let (snapshot, stats) = snapshot_from_path(
        &args.input.input,
        args.input.format(),
        &args.input.options(),
    )?;
    let report = full_report(&snapshot)?;
    let envelope = ReportEnvelope::new(
        echo.to_string(),
        Some(digest),
        !args.input.feedback_driven,
        ResultsPayload::Analysis(AnalysisResults {
            report,
            records_skipped: stats.skipped,
            duplicate_pairs: stats.duplicate_pairs,
        }),
    );
    print_stdout(&envelope.to_json_pretty())
}

fn cmd_extrapolate(args: &ExtrapolateArgs) -> Result<(), CliError> {
    let (snapshot, _) = snapshot_from_path(
        &args.input.input,
        args.input.format(),
        &args.input.options(),
    )?;
    let curve = extrapolation_curve(&snapshot, args.horizon, args.steps)?;
    let mut out = String::from("m_star,s_pred,u_pred\n");
    for p in &curve.points {
        out.push_str(&format!("{},{},{}\n", p.m_star, p.s_pred, p.u_pred));
    }
    print_stdout(&out)
}

fn cmd_stoprule(args: &StopruleArgs, echo: &str) -> Result<(), CliError> {
    let digest = args.input.digest()?;
    let (snapshot, _) = snapshot_from_path(
        &args.input.input,
        args.input.format(),
        &args.input.options(),
    )?;
    let report = full_report(&snapshot)?;
    let rule = stop_rule(report.n, report.f1, report.f0_hat, args.risk)?;
    let envelope = ReportEnvelope::new(
        echo.to_string(),
        Some(digest),
        !args.input.feedback_driven,
        ResultsPayload::StopRule(StopRuleResults {
            n: report.n,
            f1: report.f1,
            f0_hat: report.f0_hat,
            u_hat: report.u_hat,
            theta: args.risk,
            rule,
        }),
    );
    print_stdout(&envelope.to_json_pretty())
}

/// Truth sidecar: the model (with probabilities), seed, and the
/// ground-truth table, enough to audit any estimate made from the
/// records file.
#[derive(serde::Serialize)]
struct TruthSidecar<'a> {
    model: &'a GroundTruthModel,
    seed: u64,
    n: u64,
    truth: &'a [TruthPoint],
}

fn cmd_simulate(args: &SimulateArgs, echo: &str) -> Result<(), CliError> {
    let descriptor = match args.dist {
        DistArg::Uniform => Distribution::Uniform,
        DistArg::Zipf => Distribution::Zipf {
            alpha: args.zipf_alpha,
        },
        DistArg::Geometric => Distribution::Geometric { ratio: args.ratio },
        DistArg::Endemic => Distribution::Endemic {
            core_mass: args.core_mass,
            island_count: args.islands,
        },
    };
    let mode = match args.mode {
        ModeArg::Abundance => Mode::Abundance,
        ModeArg::Incidence => Mode::Incidence,
    };
    let model = build_model(args.species, descriptor, mode)?;
    let campaign = simulate(&model, args.tests, args.seed)?;

    let records_path = args.out.clone();
    let truth_path = args.out.with_extension("truth.json");
    let write_err = |path: &Path| {
        let path = path.display().to_string();
        move |source| CliError::Output { path, source }
    };
    let mut records_file =
        std::fs::File::create(&records_path).map_err(write_err(&records_path))?;
    crate::ingest::emit_jsonl(&campaign.records, &mut records_file)
        .map_err(write_err(&records_path))?;
    let sidecar = TruthSidecar {
        model: &model,
        seed: args.seed,
        n: campaign.n,
        truth: &campaign.truth,
    };
    let mut sidecar_json =
        serde_json::to_string_pretty(&sidecar).expect("sidecar serializes infallibly");
    sidecar_json.push('\n');
    std::fs::write(&truth_path, sidecar_json).map_err(write_err(&truth_path))?;

    let final_truth = campaign.truth.last().expect("truth grid ends at n");
    let envelope = ReportEnvelope::new(
        echo.to_string(),
        None,
        true,
        ResultsPayload::Simulation(SimulationResults {
            records_path: records_path.display().to_string(),
            truth_path: truth_path.display().to_string(),
            n: campaign.n,
            s_true: model.s_true,
            mode,
            descriptor,
            seed: args.seed,
            species_seen: final_truth.species_seen,
            u_true_final: final_truth.u_true,
        }),
    );
    print_stdout(&envelope.to_json_pretty())
}

fn cmd_turningpoint(args: &TurningpointArgs, echo: &str) -> Result<(), CliError> {
    if !(args.alpha > 0.0 && args.alpha < 1.0) {
        return Err(CliError::BadAlpha { alpha: args.alpha });
    }
    let digest = digest_path(&args.input).map_err(|source| CliError::Input {
        path: args.input.display().to_string(),
        source,
    })?;
    let text = std::fs::read_to_string(&args.input).map_err(|source| CliError::Input {
        path: args.input.display().to_string(),
        source,
    })?;
    let mut series = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let value: f64 = trimmed.parse().map_err(|_| CliError::BadNumber {
            path: args.input.display().to_string(),
            line: i as u64 + 1,
            content: trimmed.to_string(),
        })?;
        series.push(value);
    }
    let result = turning_point_test(&series)?;
    let envelope = ReportEnvelope::new(
        echo.to_string(),
        Some(digest),
        true,
        ResultsPayload::TurningPoint(TurningPointResults {
            result,
            alpha: args.alpha,
            iid_rejected: result.p_value < args.alpha,
        }),
    );
    print_stdout(&envelope.to_json_pretty())
}
