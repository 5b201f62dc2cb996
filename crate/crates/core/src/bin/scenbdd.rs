use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use scenbdd::cli::{self, RunConfig};
use scenbdd::{Error, DEFAULT_NODE_CAP};

#[derive(Parser)]
#[command(name = "scenbdd", version, about = "Scenario ladders, BDD compilation and exact MILP emission")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate the critical-value ladder of an instance
    Ladder(Flags),
    /// Compile every ladder level and print diagram sizes
    Compile(Flags),
    /// Print the recourse distribution and expectation for a decision
    Evaluate(Flags),
    /// Write the mixed-integer model as an LP file
    Emit(Flags),
    /// Compare pipeline, model and brute force on every feasible decision
    Check(Flags),
    /// Diagram sizes on random grid networks
    BenchGrid(Flags),
}

#[derive(Args)]
struct Flags {
    #[arg(long)]
    instance: Option<PathBuf>,
    #[arg(long)]
    ladder: Option<PathBuf>,
    /// occ, cmk, id or file
    #[arg(long, default_value = "occ")]
    order: String,
    #[arg(long)]
    order_file: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Decision as a 0/1 string over all edges
    #[arg(long)]
    x: Option<String>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Overridden by SCENBDD_NODE_CAP
    #[arg(long, default_value_t = DEFAULT_NODE_CAP)]
    node_cap: usize,
    /// Cutoff multiple of the nominal distance, or inf
    #[arg(long, default_value = "1.1")]
    alpha_factor: String,
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long, default_value_t = 32)]
    reps: usize,
}

fn config(f: Flags) -> Result<RunConfig, Error> {
    let node_cap = match std::env::var("SCENBDD_NODE_CAP") {
        Ok(v) => v
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("SCENBDD_NODE_CAP='{v}' is not a count")))?,
        Err(_) => f.node_cap,
    };
    Ok(RunConfig {
        order: cli::parse_order(&f.order, f.order_file.as_deref())?,
        alpha_factor: cli::parse_alpha_factor(&f.alpha_factor)?,
        instance: f.instance,
        ladder: f.ladder,
        out: f.out,
        x: f.x,
        seed: f.seed,
        node_cap,
        n: f.n,
        reps: f.reps,
    })
}

type Runner = fn(&RunConfig, &mut dyn Write) -> scenbdd::Result<()>;

fn main() -> ExitCode {
    let args = Cli::parse();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let (run, flags): (Runner, Flags) = match args.command {
        Command::Ladder(f) => (cli::cmd_ladder, f),
        Command::Compile(f) => (cli::cmd_compile, f),
        Command::Evaluate(f) => (cli::cmd_evaluate, f),
        Command::Emit(f) => (cli::cmd_emit, f),
        Command::Check(f) => (cli::cmd_check, f),
        Command::BenchGrid(f) => (cli::cmd_bench_grid, f),
    };
    let result = config(flags).and_then(|cfg| run(&cfg, &mut out));
    let _ = out.flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
