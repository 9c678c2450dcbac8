use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};

use kinvlasov::verify;

#[derive(Parser)]
#[command(
    name = "kinvlasov",
    version,
    about = "Two-species 1D1V Vlasov solver with potential fields"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a simulation and write diagnostics, snapshots and a manifest.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the built-in oracle cases.
    Verify {
        /// Run only this case.
        #[arg(long)]
        case: Option<String>,
    },
    /// Run one config under both force laws and write `divergence.csv`.
    Compare {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print every config key with its default value.
    Defaults,
}

fn configure_threads() -> anyhow::Result<()> {
    let Ok(raw) = std::env::var("KINVLASOV_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .with_context(|| format!("KINVLASOV_THREADS must be a positive integer, got `{raw}`"))?;
    if threads == 0 {
        bail!("KINVLASOV_THREADS must be a positive integer, got 0");
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .context("configuring the thread pool")?;
    Ok(())
}

fn execute(cli: Cli) -> anyhow::Result<bool> {
    configure_threads()?;
    match cli.command {
        Command::Run { config, out } => {
            let summary = kinvlasov::run_command(&config, &out)
                .with_context(|| format!("run of {}", config.display()))?;
            println!(
                "completed {} steps (dt = {:?}); {} diagnostics rows and {} files in {}",
                summary.steps,
                summary.dt,
                summary.diagnostics_rows,
                summary.files.len(),
                out.display()
            );
            Ok(true)
        }
        Command::Verify { case } => {
            let reports = match case {
                Some(name) => match verify::run_case(&name) {
                    Some(r) => vec![r],
                    None => bail!(
                        "unknown case `{name}`; available: {}",
                        verify::CASES.join(", ")
                    ),
                },
                None => verify::run_all(),
            };
            for r in &reports {
                println!("{r}");
            }
            let passed = reports.iter().filter(|r| r.passed).count();
            println!("{passed}/{} cases passed", reports.len());
            Ok(passed == reports.len())
        }
        Command::Compare { config, out } => {
            let rows = kinvlasov::compare_command(&config, &out)
                .with_context(|| format!("compare of {}", config.display()))?;
            if let Some(last) = rows.last() {
                println!(
                    "{} rows; final f distances {:e} (plus), {:e} (minus)",
                    rows.len(),
                    last.f_plus_dist,
                    last.f_minus_dist
                );
            }
            Ok(true)
        }
        Command::Defaults => {
            print!("{}", kinvlasov::config_file::default_config_text());
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
