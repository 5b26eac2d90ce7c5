//! Front end for `bcov-core`: reads JSON (or CSV) inputs, runs the library
//! and writes JSON reports with exact numbers as `"p/q"` strings.
//!
//! Exit codes: 0 success, 1 i/o or usage error, 2 validation error (schema,
//! invariant, missing preset, or a lint under `--strict`), 3 inconsistency
//! between formulas that should agree.

pub mod analyze;
pub mod commands;
pub mod dto;
pub mod error;

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

pub use error::{exit, CliError, CliResult};

use commands::FitModel;
use dto::{from_json, to_json, BranchDto, Descriptor};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Analyze,
    Monodromy,
    Exponents,
    Fit,
    Torus,
    /// Rewrites a descriptor in canonical form.
    Format,
}

impl Command {
    fn extension(self) -> &'static str {
        match self {
            Command::Fit => "csv",
            _ => "json",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Settings {
    pub presets_dir: PathBuf,
    pub strict: bool,
    pub branch: Option<BranchDto>,
    pub center: Option<i64>,
    pub fit_model: FitModel,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            presets_dir: PathBuf::from("presets"),
            strict: false,
            branch: None,
            center: None,
            fit_model: FitModel::Hodge,
        }
    }
}

/// Result of one command: the JSON written to stdout (if any) and the error
/// that decides the exit code. An analysis whose cross-checks fail has both.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub output: Option<String>,
    pub error: Option<CliError>,
}

impl Outcome {
    fn from_result<T: Serialize>(r: CliResult<T>) -> Self {
        match r {
            Ok(v) => Outcome {
                output: Some(to_json(&v)),
                error: None,
            },
            Err(e) => Outcome {
                output: None,
                error: Some(e),
            },
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.error.as_ref().map_or(exit::OK, CliError::exit_code)
    }

    pub fn error_json(&self) -> Option<String> {
        self.error.as_ref().map(|e| to_json(&e.payload()))
    }
}

pub fn run_text(command: Command, text: &str, settings: &Settings) -> Outcome {
    match command {
        Command::Analyze => match analyze::analyze_text(text, &settings.presets_dir) {
            Ok(report) => Outcome {
                output: Some(to_json(&report)),
                error: report.verdict(settings.strict),
            },
            Err(e) => Outcome::from_result::<()>(Err(e)),
        },
        Command::Monodromy => Outcome::from_result(commands::monodromy(text, settings.branch, settings.center)),
        Command::Exponents => Outcome::from_result(commands::exponents(text)),
        Command::Fit => Outcome::from_result(commands::fit(text, settings.fit_model)),
        Command::Torus => Outcome::from_result(commands::torus(text)),
        Command::Format => match from_json::<Descriptor>(text) {
            Ok(d) => Outcome {
                output: Some(to_json(&d)),
                error: None,
            },
            Err(e) => Outcome::from_result::<()>(Err(e)),
        },
    }
}

pub fn run_file(command: Command, path: &Path, settings: &Settings) -> Outcome {
    match std::fs::read_to_string(path) {
        Ok(text) => run_text(command, &text, settings),
        Err(e) => Outcome::from_result::<()>(Err(CliError::Io(format!("{}: {e}", path.display())))),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BatchEntry {
    pub input: String,
    pub output: String,
    pub exit_code: i32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BatchSummary {
    pub entries: Vec<BatchEntry>,
    pub exit_code: i32,
}

/// Runs `command` on every matching file of `dir` concurrently. Each input
/// `x.json` yields `out/x.json`, or `out/x.error.json` when it produced no report.
pub fn run_batch(command: Command, dir: &Path, out: &Path, settings: &Settings) -> CliResult<BatchSummary> {
    let mut inputs: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == command.extension()))
        .collect();
    inputs.sort();
    std::fs::create_dir_all(out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;

    let entries = inputs
        .par_iter()
        .map(|path| {
            let stem = path.file_stem().unwrap_or_default().to_string_lossy().into_owned();
            let outcome = run_file(command, path, settings);
            let (name, body) = match (&outcome.output, outcome.error_json()) {
                (Some(report), _) => (format!("{stem}.json"), report.clone()),
                (None, Some(err)) => (format!("{stem}.error.json"), err),
                (None, None) => unreachable!("an outcome has a report or an error"),
            };
            let target = out.join(&name);
            std::fs::write(&target, body).map_err(|e| CliError::Io(format!("{}: {e}", target.display())))?;
            Ok(BatchEntry {
                input: path.file_name().unwrap_or_default().to_string_lossy().into_owned(),
                output: name,
                exit_code: outcome.exit_code(),
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    let exit_code = entries.iter().map(|e| e.exit_code).max().unwrap_or(exit::OK);
    Ok(BatchSummary { entries, exit_code })
}
