use clap::{Parser, Subcommand};
use hystersolve::cli::{self, GlobalOpts};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "hystersolve",
    about = "Implicit solver and estimate-verification harness for degenerate diffusion with Preisach hysteresis"
)]
struct Cli {
    /// Proceed past failed compatibility checks.
    #[arg(long, global = true)]
    force: bool,
    /// Override the output directory of the config.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation with diagnostics, snapshots, and the estimate suite.
    Run { config: PathBuf },
    /// Run the scenario at tau, tau/2, ... and report convergence metrics.
    Refine {
        config: PathBuf,
        #[arg(long, default_value_t = 3)]
        levels: usize,
    },
    /// Check the initial compatibility conditions and print the report.
    CheckCompat { config: PathBuf },
    /// Compute norms of CSV-sampled functions (layouts: t,value or x,t,value).
    Norms {
        csv: PathBuf,
        #[arg(long = "norm")]
        norms: Vec<String>,
    },
}

fn main() {
    let cli = Cli::parse();
    let opts = GlobalOpts {
        force: cli.force,
        out_dir: cli.out_dir,
    };
    let code = match cli.command {
        Command::Run { config } => cli::cmd_run(&config, &opts),
        Command::Refine { config, levels } => cli::cmd_refine(&config, levels, &opts),
        Command::CheckCompat { config } => cli::cmd_check_compat(&config),
        Command::Norms { csv, norms } => cli::cmd_norms(&csv, &norms),
    };
    std::process::exit(code);
}
