use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use finsler_cli::commands::{self, CommandError, EXIT_FAILURE, EXIT_OK};

/// Numerical verification of generalized Randers geometry.
///
/// Thread count follows RAYON_NUM_THREADS.
#[derive(Parser)]
#[command(name = "finsler", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run residual checks and emit a JSON report.
    Verify {
        #[arg(long)]
        config: PathBuf,
        /// Report path; printed to stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print all frame and Randers quantities at one point.
    Jet {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_delimiter = ',', num_args = 1.., allow_negative_numbers = true, required = true)]
        x: Vec<f64>,
        #[arg(long, value_delimiter = ',', num_args = 1.., allow_negative_numbers = true, required = true)]
        y: Vec<f64>,
    },
    /// Integrate and compare the geodesics of L and L*.
    Geodesic {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// List the built-in instances.
    Catalog,
}

fn run(cli: Cli) -> Result<i32, CommandError> {
    match cli.command {
        Command::Verify { config, out } => {
            let report = commands::verify(&config, out.as_deref())?;
            if out.is_none() {
                println!("{}", report.to_json());
            }
            for c in &report.checks {
                eprintln!(
                    "{} {:<32} max={:.3e} evaluated={} skipped={}",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.id,
                    c.max,
                    c.evaluated,
                    c.skipped
                );
            }
            Ok(if report.all_pass() { EXIT_OK } else { EXIT_FAILURE })
        }
        Command::Jet { config, x, y } => {
            let v = commands::jet(&config, &x, &y)?;
            println!("{}", serde_json::to_string_pretty(&v).expect("jet output serializes"));
            Ok(EXIT_OK)
        }
        Command::Geodesic { config, out_dir } => {
            let v = commands::geodesic(&config, &out_dir)?;
            println!("{}", serde_json::to_string_pretty(&v).expect("summary serializes"));
            Ok(EXIT_OK)
        }
        Command::Catalog => {
            print!("{}", commands::catalog());
            Ok(EXIT_OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = run(cli).unwrap_or_else(|e| {
        eprintln!("error: {e}");
        e.exit_code()
    });
    ExitCode::from(code as u8)
}
