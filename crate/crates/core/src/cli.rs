//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 on runtime errors and failed verification,
//! 2 on bad flags or input that does not parse.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::Error;
use crate::experiments::{aggregate, run_figure_to_dir, ExperimentConfig, PRESETS};
use crate::fmt::sig;
use crate::model::{opt_cost, Instance};
use crate::policies::{simulate, PolicyConfig};
use crate::verify::{run_suite, SUITES};

pub const OUT_DIR_ENV: &str = "PROGBAR_OUT_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "progbar-sched",
    version,
    about = "Non-clairvoyant scheduling with progress bars"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one policy on one instance and print completion times, ALG, OPT and the ratio.
    Simulate {
        /// Instance JSON file.
        #[arg(long)]
        instance: PathBuf,
        /// Policy JSON, e.g. '{"variant":"RR"}', or @FILE.
        #[arg(long)]
        policy: String,
        /// Write the event log (TSV) to this file, or `-` for stdout.
        #[arg(long, value_name = "PATH")]
        dump_events: Option<PathBuf>,
    },
    /// Run a figure pipeline and write `<figure>.csv` into the output directory.
    Figure(FigureArgs),
    /// Run an invariant suite; exits 1 if any check fails.
    Verify {
        /// Suite name or `all`.
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Worker threads.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Print the optimal total completion time of an instance.
    Opt {
        #[arg(long)]
        instance: PathBuf,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false, id = "source")]
pub struct FigureSource {
    /// One of smoothness_rho, robustification, stochastic, thm_checks.
    #[arg(long)]
    pub preset: Option<String>,
    /// Experiment config JSON file.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FigureArgs {
    #[command(flatten)]
    pub source: FigureSource,
    #[arg(long, env = OUT_DIR_ENV, default_value = "out")]
    pub out: PathBuf,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    pub jobs: Option<usize>,
}

enum Failure {
    Usage(String),
    Runtime(String),
    Violations,
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Runtime(_) | Failure::Violations => 1,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

/// Errors from reading user input: parse and validation problems are usage
/// errors, the rest (missing files, ...) runtime errors.
fn input_error(what: &str, e: Error) -> Failure {
    match e {
        Error::Json(_)
        | Error::InvalidBar(_)
        | Error::InvalidInstance(_)
        | Error::InvalidParameter(_)
        | Error::EmptyInstance => Failure::Usage(format!("{what}: {e}")),
        other => Failure::Runtime(format!("{what}: {other}")),
    }
}

fn load_instance(path: &Path) -> Result<Instance, Failure> {
    Instance::load(path).map_err(|e| input_error(&format!("instance {}", path.display()), e))
}

fn parse_policy(arg: &str) -> Result<PolicyConfig, Failure> {
    let text = match arg.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).map_err(|e| Failure::Runtime(format!("policy {path}: {e}")))?,
        None => arg.to_string(),
    };
    PolicyConfig::from_json(&text).map_err(|e| input_error("policy", e))
}

fn set_threads(jobs: Option<usize>) -> Result<(), Failure> {
    if let Some(k) = jobs {
        if k == 0 {
            return Err(Failure::Usage("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| Failure::Runtime(e.to_string()))?;
    }
    Ok(())
}

fn simulate_cmd(instance: &Path, policy: &str, dump: Option<&Path>, out: &mut dyn Write) -> Result<(), Failure> {
    let inst = load_instance(instance)?;
    let config = parse_policy(policy)?;
    let outcome = simulate(&inst, &config)?;
    let opt = opt_cost(&inst)?;
    let io = |e: std::io::Error| Failure::Runtime(e.to_string());
    for (j, c) in outcome.completion.iter().enumerate() {
        writeln!(out, "C[{j}]={}", sig(*c, 12)).map_err(io)?;
    }
    writeln!(out, "ALG={}", sig(outcome.total_cost, 12)).map_err(io)?;
    writeln!(out, "OPT={}", sig(opt, 12)).map_err(io)?;
    writeln!(out, "ratio={}", sig(outcome.total_cost / opt, 12)).map_err(io)?;
    match dump {
        Some(p) if p == Path::new("-") => write!(out, "{}", outcome.event_log_tsv()).map_err(io)?,
        Some(p) => std::fs::write(p, outcome.event_log_tsv()).map_err(|e| Error::io(p, e))?,
        None => {}
    }
    Ok(())
}

fn figure_cmd(args: &FigureArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    let mut config = match (&args.source.preset, &args.source.config) {
        (Some(name), _) => ExperimentConfig::preset(name).map_err(|e| input_error("preset", e))?,
        (None, Some(path)) => {
            ExperimentConfig::load(path).map_err(|e| input_error(&format!("config {}", path.display()), e))?
        }
        (None, None) => {
            return Err(Failure::Usage(format!(
                "need --preset ({}) or --config",
                PRESETS.join(", ")
            )))
        }
    };
    if let Some(n) = args.n {
        config.n = n;
    }
    if let Some(t) = args.trials {
        config.trials = t;
    }
    if let Some(s) = args.seed {
        config.master_seed = s;
    }
    config.validate().map_err(|e| input_error("config", e))?;
    if args.jobs == Some(0) {
        return Err(Failure::Usage("--jobs must be at least 1".into()));
    }
    let written = run_figure_to_dir(&config, &args.out, args.jobs)?;
    let io = |e: std::io::Error| Failure::Runtime(e.to_string());
    writeln!(err, "wrote {}", written.csv.display()).map_err(io)?;
    if let Some(meta) = &written.meta {
        writeln!(err, "wrote {}", meta.display()).map_err(io)?;
    }
    writeln!(out, "algorithm\tparams\tx\ttrials\tmean\tstd").map_err(io)?;
    for s in aggregate(&written.records) {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}",
            s.algorithm,
            s.params,
            sig(s.x, 10),
            s.trials,
            sig(s.mean, 10),
            sig(s.std, 10)
        )
        .map_err(io)?;
    }
    Ok(())
}

fn verify_cmd(suite: &str, seed: u64, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    let names: Vec<&str> = if suite == "all" {
        SUITES.to_vec()
    } else if SUITES.contains(&suite) {
        vec![suite]
    } else {
        return Err(Failure::Usage(format!(
            "unknown suite {suite:?} (expected all or one of {})",
            SUITES.join(", ")
        )));
    };
    let io = |e: std::io::Error| Failure::Runtime(e.to_string());
    let mut failed = false;
    for name in names {
        let report = run_suite(name, seed)?;
        for c in &report.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            writeln!(out, "{tag}\t{}\t{}", c.property, c.detail).map_err(io)?;
        }
        for c in report.failures() {
            failed = true;
            writeln!(
                err,
                "violation: {} (suite {name}, seed {seed}): {}",
                c.property, c.detail
            )
            .map_err(io)?;
        }
        writeln!(err, "{name}: {:.1}s", report.seconds).map_err(io)?;
    }
    if failed {
        Err(Failure::Violations)
    } else {
        Ok(())
    }
}

/// Parses `args` (program name first) and runs the command. Returns the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return e.exit_code();
        }
    };
    let result = match &cli.command {
        Command::Simulate {
            instance,
            policy,
            dump_events,
        } => simulate_cmd(instance, policy, dump_events.as_deref(), out),
        Command::Figure(args) => figure_cmd(args, out, err),
        Command::Verify { suite, seed, jobs } => set_threads(*jobs).and_then(|_| verify_cmd(suite, *seed, out, err)),
        Command::Opt { instance } => load_instance(instance).and_then(|inst| {
            let opt = opt_cost(&inst)?;
            writeln!(out, "{}", sig(opt, 12)).map_err(|e| Failure::Runtime(e.to_string()))
        }),
    };
    match result {
        Ok(()) => 0,
        Err(f) => {
            match &f {
                Failure::Usage(msg) => {
                    let _ = writeln!(err, "error: {msg}");
                }
                Failure::Runtime(msg) => {
                    let _ = writeln!(err, "error: {msg}");
                }
                Failure::Violations => {}
            }
            f.code()
        }
    }
}
