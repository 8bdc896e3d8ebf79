use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dirac2d::cli::{run_separate, run_verify, CliError, VerificationConfig};

#[derive(Parser)]
#[command(
    name = "dirac2d",
    about = "Numerical verification of Dirac symmetry operators and separation of variables on 2D spin manifolds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the verification tasks listed in a config and report residuals.
    Verify {
        /// Path to a `section.key = value` config file.
        config: PathBuf,
        /// Emit one JSON object per task instead of the table.
        #[arg(long)]
        json: bool,
        /// Override the seed from the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Rerun grid-quadrature tasks at K× resolution and report the ratio.
        #[arg(long, value_name = "K")]
        grid_refine: Option<usize>,
        /// Also write the full report as JSON to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve the separated y-system and export the factor tables.
    Separate {
        /// Path to a config with a `separate` section and Liouville geometry.
        config: PathBuf,
        /// Output CSV path (columns y, Re/Im b1, Re/Im b2).
        #[arg(long)]
        csv: PathBuf,
    },
}

fn load_config(path: &PathBuf) -> Result<VerificationConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Config {
        line: 0,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    VerificationConfig::parse(&text)
}

fn run() -> Result<i32, CliError> {
    let cli = Cli::parse();
    match cli.command {
        Command::Verify {
            config,
            json,
            seed,
            grid_refine,
            out,
        } => {
            let mut cfg = load_config(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let report = run_verify(&cfg, grid_refine.unwrap_or(1).max(1))?;
            if json {
                print!("{}", report.render_json_lines());
            } else {
                print!("{}", report.render_table());
            }
            if let Some(path) = out {
                let body = serde_json::to_string_pretty(&report).expect("report serializes");
                fs::write(&path, body + "\n").map_err(|e| CliError::Config {
                    line: 0,
                    message: format!("cannot write {}: {e}", path.display()),
                })?;
            }
            Ok(report.exit_code())
        }
        Command::Separate { config, csv } => {
            let cfg = load_config(&config)?;
            let sol = run_separate(&cfg)?;
            let file = fs::File::create(&csv).map_err(|e| CliError::Config {
                line: 0,
                message: format!("cannot create {}: {e}", csv.display()),
            })?;
            sol.write_csv(file).map_err(|e| CliError::Config {
                line: 0,
                message: format!("cannot write {}: {e}", csv.display()),
            })?;
            println!(
                "wrote {} rows to {} (lambda = {}, kappa = {}, mu1*mu2 = {})",
                sol.ys.len(),
                csv.display(),
                sol.lambda,
                sol.kappa,
                sol.mu1 * sol.mu2
            );
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
