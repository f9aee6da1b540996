use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use collectivity_sim::{Command, Overrides, RunConfig};

/// Collectivity of Raman-heralded atomic excitations in inhomogeneously
/// broadened ensembles.
#[derive(Debug, Parser)]
#[command(name = "collectivity-sim", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,

    /// JSON config file; every field is optional.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Δ₀ values in MHz (detunings for `single`).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    delta0: Option<Vec<f64>>,

    /// Γ values in MHz (`single` uses the first).
    #[arg(long, value_delimiter = ',')]
    gamma: Option<Vec<f64>>,

    /// Number of quadrature nodes (odd).
    #[arg(long)]
    nodes: Option<usize>,

    /// Time step in μs.
    #[arg(long)]
    dt: Option<f64>,

    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Also write SVG plots.
    #[arg(long)]
    svg: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let overrides = Overrides {
        delta0: cli.delta0,
        gamma: cli.gamma,
        nodes: cli.nodes,
        dt: cli.dt,
        out: cli.out,
        svg: cli.svg,
    };
    let result = RunConfig::load(cli.config.as_deref(), &overrides)
        .and_then(|cfg| cli.command.run(&cfg));
    match result {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("collectivity-sim: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
