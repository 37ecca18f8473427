//! Experiment runner: TOML configuration, dispatch to the numerical core,
//! and CSV/JSON result files.

pub mod config;
pub mod experiments;
pub mod output;

use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::{json, Value as Json};

use config::{check, Diagnostic, Experiment, ExperimentConfig, Format};
use degenlab_core::LabError;
use output::Row;

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_MODULE: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug)]
pub enum CliError {
    Config(Vec<Diagnostic>),
    Module(LabError),
    Io(String),
}

impl From<LabError> for CliError {
    fn from(e: LabError) -> Self {
        Self::Module(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e.to_string())
    }
}

/// Name of an error variant, e.g. `ForbiddenExponent`.
fn variant(e: &LabError) -> String {
    format!("{e:?}").chars().take_while(|c| c.is_alphanumeric()).collect()
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self::Config(vec![Diagnostic::error(None, message)])
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => EXIT_CONFIG,
            Self::Module(_) => EXIT_MODULE,
            Self::Io(_) => EXIT_IO,
        }
    }

    /// Machine-readable error object.
    pub fn to_json(&self) -> Json {
        let body = match self {
            Self::Config(d) => json!({
                "kind": "config",
                "message": d.first().map_or("invalid configuration".to_string(), |d| d.message.clone()),
                "diagnostics": d,
            }),
            Self::Module(e) => json!({ "kind": "module", "variant": variant(e), "message": e.to_string() }),
            Self::Io(m) => json!({ "kind": "io", "message": m }),
        };
        json!({ "error": body })
    }
}

/// Checks `config` for `kind`, runs it, and prefixes every row with the
/// experiment id and config hash.
pub fn run(config: &ExperimentConfig, kind: Experiment) -> Result<(Vec<Row>, Json), CliError> {
    let errors: Vec<Diagnostic> = check(config, Some(kind)).into_iter().filter(Diagnostic::is_error).collect();
    if !errors.is_empty() {
        return Err(CliError::Config(errors));
    }
    let (rows, summary) = match kind {
        Experiment::Norms => experiments::norms(config),
        Experiment::Hardy => experiments::hardy(config),
        Experiment::EulerExact => experiments::euler_exact(config),
        Experiment::SolveElliptic => experiments::solve_elliptic(config),
        Experiment::SolveParabolic => experiments::solve_parabolic(config),
        Experiment::BsPrice => experiments::bs_price(config),
        Experiment::ThetaSweep => experiments::theta_sweep_run(config),
        Experiment::LambdaSweep => experiments::lambda_sweep_run(config),
        Experiment::InkSpots => experiments::ink_spots(config),
        Experiment::ApWeight => experiments::ap_weight(config),
        Experiment::Convergence => experiments::convergence(config),
    }?;
    let hash = config.hash(kind);
    let rows = rows
        .into_iter()
        .map(|r| {
            let mut cells = vec![("experiment", kind.as_str().into()), ("config_hash", hash.clone().into())];
            cells.extend(r.cells);
            Row { cells }
        })
        .collect();
    Ok((rows, summary))
}

/// Writes `results.csv` (or `results.json`) and `summary.json` into `dir`.
pub fn write_outputs(
    dir: &Path,
    format: Format,
    kind: Experiment,
    config: &ExperimentConfig,
    rows: &[Row],
    summary: Json,
    warnings: &[Diagnostic],
) -> Result<(), CliError> {
    fs::create_dir_all(dir)?;
    let results = match format {
        Format::Csv => {
            output::write_csv(&dir.join("results.csv"), rows)?;
            "results.csv"
        }
        Format::Json => {
            output::write_json(&dir.join("results.json"), &output::rows_json(rows))?;
            "results.json"
        }
    };
    let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    let doc = json!({
        "experiment": kind.as_str(),
        "config_hash": config.hash(kind),
        "seed": config.seed(),
        "results": results,
        "rows": rows.len(),
        "columns": output::header(rows),
        "threads": rayon::current_num_threads(),
        "warnings": warnings,
        "summary": summary,
        "timestamp_unix": timestamp,
    });
    output::write_json(&dir.join("summary.json"), &doc)?;
    Ok(())
}
