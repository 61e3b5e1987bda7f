mod catalog;
mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rootchain::admissibility::CondCMode;

/// Real-root arrangements of a polynomial and its s-th derivative.
#[derive(Debug, Parser)]
#[command(name = "rootchain", version, about)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Print machine-readable JSON instead of tables.
    #[arg(long, global = true)]
    pub json: bool,
    /// Write the catalog (enumerate, verify) or the JSON report to PATH;
    /// catalogs ending in `.csv` are written as CSV.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Solver settings in TOML; falls back to $ROOTCHAIN_CONFIG.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for verify.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    /// When condition C is enforced: `hyperbolic-only` or `always`.
    #[arg(long, global = true, value_name = "MODE")]
    pub cond_c: Option<CondCMode>,
}

#[derive(Debug, Args, Clone, Copy, Default)]
pub struct ShapeArgs {
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub s: Option<u32>,
    #[arg(long)]
    pub m: Option<u32>,
    #[arg(long = "mprime")]
    pub m_prime: Option<u32>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Roots of P and P^(s), their arrangement, Rolle roots and admissibility.
    Analyze {
        polynomial: String,
        #[arg(long)]
        s: u32,
        /// Locate roots in floating point instead of exactly.
        #[arg(long)]
        float: bool,
        /// Accept a floating-point reading decided by tolerances.
        #[arg(long)]
        force_float: bool,
    },
    /// Every admissible arrangement for (n, s, m).
    Enumerate {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        s: u32,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        count_only: bool,
    },
    /// Find a polynomial whose roots follow the given arrangement.
    Realize {
        arrangement: String,
        #[command(flatten)]
        shape: ShapeArgs,
    },
    /// Realize every admissible arrangement for (n, s, m) and run the
    /// soundness sweep.
    Verify {
        #[arg(long, required_unless_present = "from_catalog")]
        n: Option<u32>,
        #[arg(long, required_unless_present = "from_catalog")]
        s: Option<u32>,
        #[arg(long, required_unless_present = "from_catalog")]
        m: Option<u32>,
        /// Random polynomials for the soundness sweep; 0 skips it.
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[arg(long, default_value_t = 6)]
        max_n: u32,
        /// Re-check the verdicts and witnesses of an existing catalog.
        #[arg(long, value_name = "PATH", conflicts_with_all = ["n", "s", "m"])]
        from_catalog: Option<PathBuf>,
    },
    /// Arrangements obtained by turning strict inequalities into equalities.
    Closure {
        arrangement: String,
        #[command(flatten)]
        shape: ShapeArgs,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
