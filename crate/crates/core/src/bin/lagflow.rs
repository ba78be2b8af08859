use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use lagflow::field::catalog_names;
use lagflow::harness::{self, EXIT_USAGE};

#[derive(Parser)]
#[command(
    name = "lagflow",
    version,
    about = "Lagrangian ideal-fluid diagnostics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List catalog fields with their parameters.
    ListFields,
    /// Run one experiment config and write its CSV and JSON summary.
    Run { config: PathBuf },
    /// Rerun an experiment over several values of one parameter.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        param: String,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        values: Vec<f64>,
    },
    /// Aggregate the JSON summaries in a directory into one table.
    Report { dir: PathBuf },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { 0 });
        }
    };
    let code = match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            harness::exit_code(&e)
        }
    };
    ExitCode::from(code as u8)
}

fn execute(command: Command) -> lagflow::Result<i32> {
    match command {
        Command::ListFields => {
            for (name, params) in catalog_names() {
                println!("{name:<10} {params}");
            }
            Ok(0)
        }
        Command::Run { config } => {
            let cfg = harness::load_config(&config)?;
            let (outcome, json) = harness::run_and_write(&cfg)?;
            let s = &outcome.summary;
            match &s.error {
                Some(err) => eprintln!("{}: error: {err}", s.id),
                None => println!(
                    "{}: {} (max deviation {}, tolerance {:e})",
                    s.id,
                    if s.pass { "pass" } else { "FAIL" },
                    s.max_deviation
                        .map(|d| format!("{d:e}"))
                        .unwrap_or_else(|| "n/a".into()),
                    s.tolerance
                ),
            }
            println!("summary: {}", json.display());
            Ok(outcome.exit_code())
        }
        Command::Sweep {
            config,
            param,
            values,
        } => {
            let cfg = harness::load_config(&config)?;
            let table = harness::sweep(&cfg, &param, &values)?;
            print!("{}", String::from_utf8_lossy(&table.to_csv().to_bytes()?));
            match table.fitted_order {
                Some(o) => println!("fitted order: {o:.3}"),
                None => println!("fitted order: n/a"),
            }
            let (csv, _) = harness::write_sweep(&cfg, &table)?;
            println!("table: {}", csv.display());
            Ok(0)
        }
        Command::Report { dir } => {
            let (table, summaries) = harness::report(&dir)?;
            print!("{}", String::from_utf8_lossy(&table.to_bytes()?));
            Ok(if summaries.iter().all(|s| s.pass) {
                0
            } else {
                1
            })
        }
    }
}
