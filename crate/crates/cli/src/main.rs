use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use bcov_cli::commands::FitModel;
use bcov_cli::dto::{to_json, BranchDto};
use bcov_cli::{exit, run_batch, run_file, CliError, Command, Settings};
use clap::{Parser, Subcommand, ValueEnum};

/// Exact asymptotics of the BCOV invariant for one-parameter degenerations.
#[derive(Parser)]
#[command(name = "bcov", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Directory holding preset files referenced by `mhs.preset_file`.
    #[arg(long, global = true, env = "BCOV_PRESETS", default_value = "presets")]
    presets_dir: PathBuf,

    /// Treat lint violations as errors (exit 2).
    #[arg(long, global = true)]
    strict: bool,

    /// Process every input file in DIR instead of a single file.
    #[arg(long, global = true, value_name = "DIR")]
    batch: Option<PathBuf>,

    /// Where batch reports go [default: DIR/reports].
    #[arg(long, global = true, value_name = "DIR", requires = "batch")]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Full κ/ϱ analysis of a degeneration descriptor.
    Analyze { input: Option<PathBuf> },
    /// Jordan–Chevalley decomposition, rotations and weight filtration of a matrix.
    Monodromy {
        input: Option<PathBuf>,
        /// Report only this branch of the logarithm.
        #[arg(long, value_enum)]
        branch: Option<BranchArg>,
        /// Center of the weight filtration.
        #[arg(long, allow_hyphen_values = true)]
        center: Option<i64>,
    },
    /// Elementary exponents of sections of a twisted frame.
    Exponents { input: Option<PathBuf> },
    /// Least-squares fit of a logarithmic expansion to CSV samples (columns t,value).
    Fit {
        input: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "hodge")]
        model: ModelArg,
    },
    /// L² covolumes and the B-factor of a flat torus.
    Torus { input: Option<PathBuf> },
    /// Print a descriptor in canonical form.
    Format { input: Option<PathBuf> },
}

#[derive(Clone, Copy, ValueEnum)]
enum BranchArg {
    Upper,
    Lower,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Bcov,
    Hodge,
}

fn emit_error(e: &CliError) -> ExitCode {
    eprint!("{}", to_json(&e.payload()));
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::IO as u8 } else { exit::OK as u8 });
        }
    };
    let mut settings = Settings {
        presets_dir: cli.presets_dir,
        strict: cli.strict,
        ..Settings::default()
    };
    let (command, input) = match cli.command {
        Cmd::Analyze { input } => (Command::Analyze, input),
        Cmd::Monodromy { input, branch, center } => {
            settings.branch = branch.map(|b| match b {
                BranchArg::Upper => BranchDto::Upper,
                BranchArg::Lower => BranchDto::Lower,
            });
            settings.center = center;
            (Command::Monodromy, input)
        }
        Cmd::Exponents { input } => (Command::Exponents, input),
        Cmd::Fit { input, model } => {
            settings.fit_model = match model {
                ModelArg::Bcov => FitModel::Bcov,
                ModelArg::Hodge => FitModel::Hodge,
            };
            (Command::Fit, input)
        }
        Cmd::Torus { input } => (Command::Torus, input),
        Cmd::Format { input } => (Command::Format, input),
    };

    match (input, cli.batch) {
        (Some(path), None) => {
            let outcome = run_file(command, &path, &settings);
            if let Some(out) = &outcome.output {
                let mut stdout = std::io::stdout().lock();
                if stdout.write_all(out.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                    return ExitCode::from(exit::IO as u8);
                }
            }
            if let Some(err) = outcome.error_json() {
                eprint!("{err}");
            }
            ExitCode::from(outcome.exit_code() as u8)
        }
        (None, Some(dir)) => {
            let out = cli.out.unwrap_or_else(|| dir.join("reports"));
            match run_batch(command, &dir, &out, &settings) {
                Ok(summary) => {
                    print!("{}", to_json(&summary));
                    ExitCode::from(summary.exit_code as u8)
                }
                Err(e) => emit_error(&e),
            }
        }
        (Some(_), Some(_)) => emit_error(&CliError::Usage("give either an input file or --batch, not both".into())),
        (None, None) => emit_error(&CliError::Usage("an input file or --batch DIR is required".into())),
    }
}
