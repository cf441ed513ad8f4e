//! Command-line frontend: entropic reports, bounds, simulations and Schur-Weyl data.

pub mod commands;
pub mod error;
pub mod scenario;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "rescode", version, about = "Message-count bounds and coding simulations for resource destroying maps")]
pub struct Cli {
    /// Worker threads for parallel sections (default: all cores)
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Write the result to this file instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// S, D, V, D2, D_s and D_H for a pair of states
    Entropy(EntropyArgs),
    /// Converse, sandwich and second-order bounds on log2 M
    Bound(BoundArgs),
    /// Random-codebook PGM simulation
    Simulate(SimulateArgs),
    /// Schur-Weyl tables, the three-qubit example and maximally twirled states
    Schurweyl {
        #[command(subcommand)]
        command: SchurweylCommand,
    },
}

#[derive(Debug, Args)]
pub struct EntropyArgs {
    /// State spec or JSON file
    #[arg(long)]
    pub rho: String,
    /// State spec, JSON file, or one of dephased, depolarized, local-twirled, twirled (uses --rdm)
    #[arg(long)]
    pub sigma: String,
    #[arg(long)]
    pub rdm: Option<String>,
    #[arg(long, default_value_t = 0.05)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.05)]
    pub delta: f64,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[arg(long)]
    pub rho: String,
    #[arg(long, default_value = "dephasing")]
    pub rdm: String,
    #[arg(long, default_value_t = 0.05)]
    pub eps: f64,
    /// Comma-separated delta grid (default: nine points spread over (0, min(eps, 1-eps)))
    #[arg(long)]
    pub delta: Option<String>,
    /// Comma-separated block lengths for the rate curve
    #[arg(long = "N")]
    pub n: Option<String>,
    /// Hamiltonian for the thermodynamic and clock bounds
    #[arg(long)]
    pub hamiltonian: Option<String>,
    #[arg(long, default_value = "1")]
    pub beta: String,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub rho: String,
    /// Map whose realizing group supplies the encodings, or a group JSON file
    #[arg(long, default_value = "dephasing")]
    pub rdm: String,
    /// Comma-separated message counts
    #[arg(long = "M", default_value = "2")]
    pub m: String,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Fixed codebook as comma-separated 0-based group indices
    #[arg(long)]
    pub codebook: Option<String>,
    /// Search for the largest M reaching this error instead of fixed M
    #[arg(long)]
    pub eps: Option<f64>,
    /// Delta grid for the bounds attached to a search
    #[arg(long)]
    pub delta: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum SchurweylCommand {
    /// The three-qubit worked example with residuals
    Demo3qubit,
    /// f^lambda, s_lambda(1^d) and block dimensions
    Table {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
    },
    /// A pure state whose collective twirl is maximally mixed
    State {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
    },
}

/// Runs a parsed command and returns the rendered output.
pub fn execute(cli: &Cli) -> CliResult<String> {
    match &cli.command {
        Command::Entropy(a) => commands::entropy(a, cli.format),
        Command::Bound(a) => commands::bound(a, cli.format),
        Command::Simulate(a) => commands::simulate(a, cli.format),
        Command::Schurweyl { command } => commands::schurweyl(command, cli.format),
    }
}

/// Parses, configures the thread pool, executes and writes the output.
pub fn run(cli: Cli) -> CliResult<()> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(error::usage("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| error::usage(e.to_string()))?;
    }
    let text = execute(&cli)?;
    match &cli.out {
        Some(path) => std::fs::write(path, text)?,
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            let written = out.write_all(text.as_bytes()).and_then(|_| {
                if text.ends_with('\n') {
                    Ok(())
                } else {
                    out.write_all(b"\n")
                }
            });
            match written {
                // a closed pipe (e.g. `| head`) is not a failure of the command
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
                other => other?,
            }
        }
    }
    Ok(())
}
