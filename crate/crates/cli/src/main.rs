use std::path::PathBuf;
use std::process::ExitCode;

use cavityspin_cli::{describe_scenarios, parse_config, run_scenario, CliError, CliResult, Formats};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "cavityspin", version, about = "Run collective-spin cavity QED scenarios from config files")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write results.json plus CSV curves
    Run {
        config: PathBuf,
        /// Override the seed from the config
        #[arg(long)]
        seed: Option<u64>,
        /// Override the output directory
        #[arg(long)]
        out: Option<PathBuf>,
        /// Comma-separated output formats: csv, json
        #[arg(long)]
        format: Option<String>,
    },
    /// List scenarios and their parameters
    ListScenarios,
    /// Parse and validate a config without running it
    Validate { config: PathBuf },
}

fn threads_from_env() -> CliResult<()> {
    let Ok(raw) = std::env::var("CAVITYSPIN_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::config(format!("CAVITYSPIN_THREADS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::config(format!("cannot size thread pool: {e}")))
}

fn execute(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::ListScenarios => {
            print!("{}", describe_scenarios());
            Ok(())
        }
        Command::Validate { config } => {
            let cfg = parse_config(&config)?;
            println!("{}: ok ({})", config.display(), cfg.scenario.name);
            Ok(())
        }
        Command::Run { config, seed, out, format } => {
            threads_from_env()?;
            let mut cfg = parse_config(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(o) = out {
                cfg.out_dir = o;
            }
            if let Some(f) = format {
                cfg.formats = Formats::parse(&f)?;
            }
            let summary = run_scenario(&cfg)?;
            for f in &summary.files {
                println!("{}", f.display());
            }
            eprintln!("{} finished in {:.2} s", cfg.scenario.name, summary.elapsed.as_secs_f64());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
