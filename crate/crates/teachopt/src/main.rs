use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use teachopt::balance::DesignVector;
use teachopt::cli::{self, CliError, Overrides};

#[derive(Parser)]
#[command(
    name = "teachopt",
    about = "Design optimization for a passive 6-DOF teaching manipulator",
    version
)]
struct Cli {
    /// Configuration file (flat key-value with [sections]).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// RNG seed override.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "teachopt-out", global = true)]
    out: PathBuf,
    /// Population size override.
    #[arg(long, global = true)]
    pop: Option<usize>,
    /// Generation count override.
    #[arg(long, global = true)]
    gens: Option<usize>,
    /// Suppress progress and warning output.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a single design and print objectives and residuals.
    Evaluate {
        /// Design file (`name = value` per line).
        #[arg(long, conflicts_with = "expert")]
        design: Option<PathBuf>,
        /// Use the built-in expert baseline design.
        #[arg(long)]
        expert: bool,
        /// Also write the operating-force profile CSV here.
        #[arg(long)]
        profile_csv: Option<PathBuf>,
    },
    /// Run the archived NSGA-II optimization.
    Optimize {
        /// Resume from an archive directory (or state.json path).
        #[arg(long)]
        resume: Option<PathBuf>,
    },
    /// Mine a final-front archive for design rules.
    Innovize {
        /// Archive directory or final_front.json path.
        archive: PathBuf,
    },
    /// Validate trajectory reachability before optimizing.
    CheckTrajectory,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let ov = Overrides { seed: cli.seed, pop: cli.pop, gens: cli.gens };
    match cli.command {
        Command::Evaluate { design, expert, profile_csv } => {
            let cfg = cli::load_config(cli.config.as_deref(), &ov, cli.quiet)?;
            let x = if expert {
                DesignVector::EXPERT
            } else {
                let path = design.ok_or_else(|| {
                    CliError::Config("pass either --design FILE or --expert".into())
                })?;
                cli::parse_design(&std::fs::read_to_string(&path).map_err(|e| {
                    CliError::Config(format!("{}: {e}", path.display()))
                })?)?
            };
            print!("{}", cli::cmd_evaluate(&cfg, &x, profile_csv.as_deref())?);
        }
        Command::Optimize { resume } => {
            let cfg = cli::load_config(cli.config.as_deref(), &ov, cli.quiet)?;
            let path = cli::cmd_optimize(&cfg, &cli.out, resume.as_deref(), cli.quiet)?;
            if !cli.quiet {
                println!("final front written to {}", path.display());
            }
        }
        Command::Innovize { archive } => {
            let report = cli::cmd_innovize(&archive, &cli.out)?;
            if !cli.quiet {
                print!("{}", report.to_text());
            }
        }
        Command::CheckTrajectory => {
            let cfg = cli::load_config(cli.config.as_deref(), &ov, cli.quiet)?;
            print!("{}", cli::cmd_check_trajectory(&cfg)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("TEACHOPT_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
