use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use giant_atoms_cli::config::{ConfigError, Scenario};
use giant_atoms_cli::presets::{write_preset, Preset};
use giant_atoms_cli::run::{self, PathFormat};

const EXIT_INVALID: u8 = 1;
const EXIT_VERIFY_FAILED: u8 = 2;

#[derive(Parser)]
#[command(version, about = "Entanglement dynamics of two giant atoms on a waveguide")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one scenario and print its trajectory as CSV
    Simulate {
        config: PathBuf,
        /// Write the CSV here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
        /// Emission rate used to rescale the time column (t = Γt / Γ)
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
    },
    /// Run the [sweep] grid of a scenario and print long-format CSV
    Sweep {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
    },
    /// List propagation paths and whether interference suppresses them
    Paths {
        config: PathBuf,
        #[arg(long, value_enum, default_value_t = PathFormat::Table)]
        format: PathFormat,
    },
    /// Compare the simulator against every closed-form reference
    Verify {
        /// Use this tolerance for every check
        #[arg(long)]
        tol: Option<f64>,
        /// Run only the named check
        #[arg(long)]
        only: Option<String>,
    },
    /// Reproduce a figure grid from the shipped preset configs
    Preset {
        #[arg(value_enum)]
        name: Preset,
        #[arg(long, env = "GIANT_ATOMS_OUT_DIR", default_value = "out")]
        out: PathBuf,
    },
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), ConfigError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            // A closed pipe is not an error worth reporting.
            let _ = stdout.write_all(text.as_bytes());
            Ok(())
        }
    }
}

fn check_gamma(gamma: f64) -> Result<(), ConfigError> {
    if gamma.is_finite() && gamma > 0.0 {
        Ok(())
    } else {
        Err(ConfigError::Invalid(format!("--gamma must be positive, got {gamma}")))
    }
}

fn execute(command: Command) -> Result<ExitCode, ConfigError> {
    match command {
        Command::Simulate { config, out, gamma } => {
            check_gamma(gamma)?;
            let sim = run::simulate(&Scenario::from_file(&config)?, gamma)?;
            emit(&sim.csv, out.as_deref())?;
            eprintln!(
                "steady state: {} ({})",
                giant_atoms_cli::format::sig9(sim.steady.value),
                if sim.steady.converged {
                    "converged"
                } else {
                    "not converged"
                }
            );
        }
        Command::Sweep { config, out, gamma } => {
            check_gamma(gamma)?;
            emit(&run::sweep(&Scenario::from_file(&config)?, gamma)?, out.as_deref())?;
        }
        Command::Paths { config, format } => {
            emit(&run::paths(&Scenario::from_file(&config)?, format)?, None)?;
        }
        Command::Verify { tol, only } => {
            if let Some(t) = tol {
                if t.is_nan() || t < 0.0 {
                    return Err(ConfigError::Invalid(format!("--tol must be non-negative, got {t}")));
                }
            }
            let report = run::verify(tol, only.as_deref())?;
            emit(&report.csv, None)?;
            eprintln!("{} of {} checks passed", report.total - report.failures, report.total);
            if report.failures > 0 {
                return Ok(ExitCode::from(EXIT_VERIFY_FAILED));
            }
        }
        Command::Preset { name, out } => {
            for path in write_preset(name, &out)? {
                eprintln!("wrote {}", path.display());
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_INVALID)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INVALID)
        }
    }
}
