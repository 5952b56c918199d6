use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gm_bridge::config::Config;
use gm_bridge::runner::Runner;
use gm_bridge::{Error, Result};

#[derive(Parser)]
#[command(name = "gm-bridge", version, about = "Asymptotic Glosten-Milgrom equilibrium engine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON config; defaults to the three-point example.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed, overrides the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Paths per batch, overrides the config.
    #[arg(long, global = true)]
    paths: Option<usize>,
    /// Output directory, overrides the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Omit the `# generated` line from CSV files.
    #[arg(long, global = true)]
    no_timestamp: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Print the lattice quantization for each δ.
    Quantize,
    /// Dump h_n and p tables.
    Price,
    /// Simulate insider paths and report profits with diagnostics.
    Simulate,
    /// Loss bound per bin from rejection-sampled paths.
    LossBound,
    /// Kyle-Back reference profits.
    Kyle,
    /// Loss bounds, occupation times and marginal distances over the δ grid.
    Converge,
    /// Run the invariant groups at δ = 0.5.
    Selftest,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Quantize => "quantize",
            Command::Price => "price",
            Command::Simulate => "simulate",
            Command::LossBound => "loss-bound",
            Command::Kyle => "kyle",
            Command::Converge => "converge",
            Command::Selftest => "selftest",
        }
    }
}

fn load(cli: &Cli) -> Result<Config> {
    let mut c = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::three_point(),
    };
    if let Some(s) = cli.seed {
        c.mc.seed = s;
    }
    if let Some(n) = cli.paths {
        c.mc.paths = n;
    }
    if let Some(o) = &cli.out {
        c.outputs.dir = o.clone();
    }
    if cli.no_timestamp {
        c.outputs.timestamp = false;
    }
    if let Ok(v) = std::env::var("GM_BRIDGE_THREADS") {
        let n = v.parse().map_err(|_| Error::Config(format!("GM_BRIDGE_THREADS must be a positive integer, got {v:?}")))?;
        c.mc.workers = Some(n);
    }
    c.validate()?;
    Ok(c)
}

fn run(cli: &Cli) -> Result<serde_json::Value> {
    let config = load(cli)?;
    if let Some(n) = config.mc.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(e.to_string()))?;
    }
    Runner::new(config).run(cli.command.name())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(v) => {
            println!("{}", serde_json::to_string_pretty(&v).expect("JSON values serialize"));
            ExitCode::SUCCESS
        }
        Err(e) => {
            println!("{}", gm_bridge::output::error_json(&e));
            ExitCode::FAILURE
        }
    }
}
