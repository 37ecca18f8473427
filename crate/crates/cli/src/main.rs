use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use degenlab_cli::config::{validate, Diagnostic, Experiment, Format};
use degenlab_cli::{run, write_outputs, CliError, EXIT_CONFIG};

#[derive(Parser)]
#[command(name = "degenlab", version, about = "Numerical experiments for degenerate equations on the half line")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for results and summary.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for randomized inputs; overrides the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads.
    #[arg(long, env = "DEGENLAB_THREADS")]
    threads: Option<usize>,
    /// Format of the results file.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Subcommand)]
enum Command {
    /// Weighted Lebesgue, Sobolev and dyadic norms.
    Norms(RunArgs),
    /// Weighted Hardy inequality.
    Hardy(RunArgs),
    /// Closed-form solution of the Euler-type equation.
    EulerExact(RunArgs),
    /// Finite-difference stationary solve.
    SolveElliptic(RunArgs),
    /// Finite-difference time-dependent solve.
    SolveParabolic(RunArgs),
    /// Black-Scholes prices by quadrature and optionally by finite differences.
    BsPrice(RunArgs),
    /// Estimate ratios across the weight window.
    ThetaSweep(RunArgs),
    /// Estimate ratios across the zeroth-order shift.
    LambdaSweep(RunArgs),
    /// Interval covering and the weighted covering bound.
    InkSpots(RunArgs),
    /// Muckenhoupt constant estimates and the doubling check.
    ApWeight(RunArgs),
    /// Convergence studies.
    Convergence(RunArgs),
    /// Runs the experiment named in the config.
    Run(RunArgs),
    /// Parses and checks a config without running it.
    Validate {
        /// TOML configuration file.
        #[arg(long)]
        config: PathBuf,
    },
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("{}", e.to_json());
    ExitCode::from(e.exit_code() as u8)
}

fn read(path: &PathBuf) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))
}

fn execute(kind: Option<Experiment>, args: RunArgs) -> Result<(), CliError> {
    let text = match &args.config {
        Some(p) => read(p)?,
        None => String::new(),
    };
    let (cfg, diags) = validate(&text, kind);
    let Some(mut cfg) = cfg else { return Err(CliError::Config(diags)) };
    let kind = kind
        .or(cfg.experiment)
        .ok_or_else(|| CliError::config("config has no `experiment` key"))?;
    if let Some(s) = args.seed {
        cfg.seed = Some(s);
    }
    let (errors, warnings): (Vec<Diagnostic>, Vec<Diagnostic>) = diags.into_iter().partition(Diagnostic::is_error);
    if !errors.is_empty() {
        return Err(CliError::Config(errors));
    }
    if let Some(n) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::config(format!("thread pool: {e}")))?;
    }
    let (rows, summary) = run(&cfg, kind)?;
    let dir = args
        .out
        .or_else(|| cfg.output.dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("degenlab-out").join(kind.as_str()));
    let format = args.format.or(cfg.output.format).unwrap_or_default();
    write_outputs(&dir, format, kind, &cfg, &rows, summary, &warnings)?;
    println!("{}", json!({ "experiment": kind.as_str(), "out": dir, "rows": rows.len() }));
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = json!({ "error": { "kind": "usage", "message": e.to_string().trim_end() } });
            eprintln!("{err}");
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    };
    let (kind, args) = match cli.command {
        Command::Validate { config } => {
            let text = match read(&config) {
                Ok(t) => t,
                Err(e) => return fail(&e),
            };
            let (_, diags) = validate(&text, None);
            let valid = !diags.iter().any(Diagnostic::is_error);
            println!("{}", json!({ "valid": valid, "diagnostics": diags }));
            return if valid { ExitCode::SUCCESS } else { ExitCode::from(EXIT_CONFIG as u8) };
        }
        Command::Run(a) => (None, a),
        Command::Norms(a) => (Some(Experiment::Norms), a),
        Command::Hardy(a) => (Some(Experiment::Hardy), a),
        Command::EulerExact(a) => (Some(Experiment::EulerExact), a),
        Command::SolveElliptic(a) => (Some(Experiment::SolveElliptic), a),
        Command::SolveParabolic(a) => (Some(Experiment::SolveParabolic), a),
        Command::BsPrice(a) => (Some(Experiment::BsPrice), a),
        Command::ThetaSweep(a) => (Some(Experiment::ThetaSweep), a),
        Command::LambdaSweep(a) => (Some(Experiment::LambdaSweep), a),
        Command::InkSpots(a) => (Some(Experiment::InkSpots), a),
        Command::ApWeight(a) => (Some(Experiment::ApWeight), a),
        Command::Convergence(a) => (Some(Experiment::Convergence), a),
    };
    match execute(kind, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}
