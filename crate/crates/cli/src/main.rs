use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use iacount::{estimate_parallel, EstimatorKind, Format, ResultRecord};
use iacount_core::mc::{McConfig, StopRule, TracePoint};
use iacount_core::psi::{feasibility_test_with, Feasibility, RANK_THRESHOLD};
use iacount_core::scenario::{Scenario, ScenarioError};
use iacount_core::{count_single_beam, parse_scenario, HypothesisError};

/// Default master seed when neither `--seed` nor `IACOUNT_SEED` is given.
const DEFAULT_SEED: u64 = 42;

#[derive(Parser)]
#[command(
    name = "iacount",
    version,
    about = "Count interference-alignment solutions of K-user MIMO interference networks",
    long_about = "Scenarios are written as products of (MxN,d) factors with optional ^K \
repetition, e.g. \"(2x2,1)^3\" or \"(2x3,1)(3x2,1)(2x4,1)(2x2,1)\"."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report the variable/equation surplus, Jacobian shape and properness.
    Info {
        scenario: String,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Decide alignment feasibility by a rank test at random channel points.
    Feasibility {
        scenario: String,
        /// Master seed (overrides IACOUNT_SEED).
        #[arg(long)]
        seed: Option<u64>,
        /// Number of test points (odd; majority vote).
        #[arg(long, default_value_t = 1)]
        trials: usize,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Count alignment solutions, exactly or by Monte Carlo estimation.
    Count {
        scenario: String,
        /// auto picks exact for single-beam, mc-square for square
        /// symmetric scenarios, mc-general otherwise.
        #[arg(long, value_enum, default_value_t)]
        method: Method,
        /// Relative-error target of the stopping rule.
        #[arg(long, default_value_t = 0.05)]
        epsilon: f64,
        /// Master seed (overrides IACOUNT_SEED).
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 10_000_000)]
        max_samples: u64,
        /// std-error stops on the standard error of the mean (95%
        /// confidence of a 2*epsilon relative error); sample-std stops on
        /// the raw sample-deviation ratio, which rarely triggers.
        #[arg(long, value_enum, default_value_t)]
        stop_rule: StopRuleArg,
        /// Worker threads for sample evaluation (0 = one per core).
        /// Results do not depend on this.
        #[arg(long, default_value_t = 0)]
        threads: usize,
        /// Write per-checkpoint trace lines (n, mean, std_error_rel) as
        /// CSV to this file.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, ValueEnum)]
enum Method {
    #[default]
    Auto,
    Exact,
    McGeneral,
    McSquare,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, ValueEnum)]
enum StopRuleArg {
    #[default]
    StdError,
    SampleStd,
}

enum CliError {
    Parse(ScenarioError),
    Hypothesis(HypothesisError),
    Usage(String),
    Io(std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) | CliError::Usage(_) => 2,
            CliError::Hypothesis(_) => 3,
            CliError::Io(_) => 1,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Parse(e) => format!("invalid scenario: {e}"),
            CliError::Hypothesis(e) => format!("hypothesis violation: {e}"),
            CliError::Usage(m) => m.clone(),
            CliError::Io(e) => format!("io error: {e}"),
        }
    }
}

impl From<ScenarioError> for CliError {
    fn from(e: ScenarioError) -> Self {
        CliError::Parse(e)
    }
}

impl From<HypothesisError> for CliError {
    fn from(e: HypothesisError) -> Self {
        CliError::Hypothesis(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("iacount: {}", err.message());
            ExitCode::from(err.exit_code())
        }
    }
}

fn resolve_seed(flag: Option<u64>) -> Result<u64, CliError> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var("IACOUNT_SEED") {
        Ok(text) => text
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("IACOUNT_SEED is not a u64: {text:?}"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Info { scenario, format } => {
            let started = Instant::now();
            let sc = parse_scenario(&scenario)?;
            let mut rec = ResultRecord::new("info", &sc);
            rec.wall_time_seconds = started.elapsed().as_secs_f64();
            print!("{}", ensure_newline(rec.render_as(format)));
            Ok(())
        }
        Command::Feasibility {
            scenario,
            seed,
            trials,
            format,
        } => {
            let started = Instant::now();
            let sc = parse_scenario(&scenario)?;
            if trials == 0 || trials % 2 == 0 {
                return Err(CliError::Usage(format!(
                    "--trials must be odd and nonzero, got {trials}"
                )));
            }
            let seed = resolve_seed(seed)?;
            let report = feasibility_test_with(&sc, seed, trials, RANK_THRESHOLD);
            let mut rec = ResultRecord::new("feasibility", &sc);
            rec.verdict = Some(report.verdict.to_string());
            if report.verdict != Feasibility::Improper {
                rec.sigma_min = Some(report.sigma_min);
                rec.sigma_max = Some(report.sigma_max);
            }
            rec.seed = Some(seed);
            rec.wall_time_seconds = started.elapsed().as_secs_f64();
            print!("{}", ensure_newline(rec.render_as(format)));
            Ok(())
        }
        Command::Count {
            scenario,
            method,
            epsilon,
            seed,
            max_samples,
            stop_rule,
            threads,
            trace,
            format,
        } => {
            let started = Instant::now();
            let sc = parse_scenario(&scenario)?;
            let seed = resolve_seed(seed)?;
            let mut rec = ResultRecord::new("count", &sc);
            rec.seed = Some(seed);

            let dims = sc.dims();
            let resolved = match method {
                Method::Auto => {
                    if dims.s != 0 {
                        return Err(HypothesisError::NotTight { s: dims.s }.into());
                    }
                    if sc.is_single_beam() {
                        Method::Exact
                    } else if dims.is_square_symmetric && sc.num_users() >= 3 {
                        Method::McSquare
                    } else {
                        Method::McGeneral
                    }
                }
                m => m,
            };

            match resolved {
                Method::Exact => {
                    let result = count_single_beam(&sc)?;
                    rec.method = Some("exact".into());
                    rec.count = Some(result.value.to_string());
                }
                Method::McGeneral | Method::McSquare => {
                    let kind = if resolved == Method::McGeneral {
                        EstimatorKind::General
                    } else {
                        EstimatorKind::Square
                    };
                    run_estimate(
                        &sc, kind, epsilon, seed, max_samples, stop_rule, threads, &trace, &mut rec,
                    )?;
                }
                Method::Auto => unreachable!("resolved above"),
            }
            rec.wall_time_seconds = started.elapsed().as_secs_f64();
            print!("{}", ensure_newline(rec.render_as(format)));
            Ok(())
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn run_estimate(
    sc: &Scenario,
    kind: EstimatorKind,
    epsilon: f64,
    seed: u64,
    max_samples: u64,
    stop_rule: StopRuleArg,
    threads: usize,
    trace: &Option<PathBuf>,
    rec: &mut ResultRecord,
) -> Result<(), CliError> {
    // A cheap rank test first: an infeasible scenario converges to zero,
    // so flag it and keep the confirmation run short.
    let report = feasibility_test_with(sc, seed, 1, RANK_THRESHOLD);
    rec.verdict = Some(report.verdict.to_string());
    let max_samples = if report.verdict == Feasibility::Feasible {
        max_samples
    } else {
        max_samples.min(10_000)
    };

    let cfg = McConfig {
        epsilon,
        seed,
        max_samples,
        stop_rule: match stop_rule {
            StopRuleArg::StdError => StopRule::StandardError,
            StopRuleArg::SampleStd => StopRule::SampleStd,
        },
        ..McConfig::default()
    };

    let mut trace_rows: Vec<TracePoint> = Vec::new();
    let est = estimate_parallel(sc, &cfg, kind, threads, |t| trace_rows.push(t))?;

    if let Some(path) = trace {
        let mut body = String::from("n,mean,std_error_rel\n");
        for t in &trace_rows {
            body.push_str(&format!("{},{:e},{:e}\n", t.n, t.mean, t.std_error_rel));
        }
        std::fs::write(path, body)?;
    }

    rec.method = Some(
        match kind {
            EstimatorKind::General => "mc-general",
            EstimatorKind::Square => "mc-square",
        }
        .into(),
    );
    rec.mean = Some(est.mean);
    rec.sample_std = Some(est.sample_std);
    rec.std_error_rel = Some(est.std_error_rel);
    rec.n_samples = Some(est.n);
    rec.nearest_integer = est.nearest_integer;
    rec.converged = Some(est.converged);
    rec.epsilon = Some(est.epsilon);
    Ok(())
}

fn ensure_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}
