//! `freedom`: slopes, point freedoms, ε-free counts, fits and fiber scans.
//!
//! Exit codes: 0 success, 2 input error, 3 internal invariant violation.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::Failure;
use config::{RunConfig, Settings};

#[derive(Parser)]
#[command(name = "freedom", version, about = "Arakelov slopes, freedom of rational points and ε-free point counts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Newton polygon of a lattice given as JSON `{rank, gram}`.
    Slope {
        /// Lattice file.
        lattice: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Freedom of one point, with its slopes and a destabilizing witness.
    Freedom(Common),
    /// Total and ε-free counts on a grid of bounds, written as CSV and JSON.
    Count(Common),
    /// Fit of `C B^a (ln B)^(b-1)` to a `B,N` or count CSV.
    Fit(Common),
    /// Freedom decay along one fiber of a fibration.
    FiberScan(Common),
}

#[derive(Args, Default)]
struct Common {
    /// `key = value` file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Preset name (P2, P1xP1, (P1)^3, bt, quadric) or descriptor file.
    #[arg(long)]
    variety: Option<String>,
    /// Point such as `1:2:2` or `1:2 ; 1:1`.
    #[arg(long, allow_hyphen_values = true)]
    point: Option<String>,
    /// Input CSV for `fit`.
    #[arg(long)]
    input: Option<String>,
    /// Comma-separated, strictly increasing height bounds.
    #[arg(long)]
    bounds: Option<String>,
    /// Exponent of the ε family, as `p/q`.
    #[arg(long)]
    alpha: Option<String>,
    /// Rounding of ε(B) before the exact comparison: `in` or `out`.
    #[arg(long)]
    eps_rounding: Option<String>,
    /// Size of the worker pool.
    #[arg(long)]
    workers: Option<String>,
    /// Output directory for report files.
    #[arg(long)]
    out: Option<String>,
    /// `csv`, `json` or `both`; `json` switches printed reports to JSON.
    #[arg(long)]
    format: Option<String>,
    /// Largest lattice rank accepted by the slope search.
    #[arg(long)]
    rank_cap: Option<String>,
}

impl Common {
    fn settings(self) -> Result<Settings, String> {
        let mut s = match &self.config {
            Some(p) => Settings::from_file(p)?,
            None => Settings::default(),
        };
        s.set("variety", self.variety);
        s.set("point", self.point);
        s.set("input", self.input);
        s.set("bounds", self.bounds);
        s.set("alpha", self.alpha);
        s.set("eps_rounding", self.eps_rounding);
        s.set("workers", self.workers);
        s.set("out", self.out);
        s.set("format", self.format);
        s.set("rank_cap", self.rank_cap);
        Ok(s)
    }
}

fn run(command: Command) -> Result<String, Failure> {
    let (name, common, lattice) = match command {
        Command::Slope { lattice, common } => ("slope", common, lattice),
        Command::Freedom(c) => ("freedom", c, None),
        Command::Count(c) => ("count", c, None),
        Command::Fit(c) => ("fit", c, None),
        Command::FiberScan(c) => ("fiber-scan", c, None),
    };
    let mut settings = common.settings()?;
    settings.set("lattice", lattice);
    let cfg = RunConfig::new(name, settings)?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.workers).build().map_err(|e| Failure::Input(format!("cannot start {} workers: {e}", cfg.workers)))?;
    pool.install(|| match name {
        "slope" => commands::slope(&cfg, &cfg.require("lattice")?.to_string()),
        "freedom" => commands::freedom(&cfg),
        "count" => commands::count(&cfg),
        "fit" => commands::fit(&cfg),
        _ => commands::fiber_scan(&cfg),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match std::panic::catch_unwind(|| run(cli.command)) {
        Ok(Ok(out)) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Ok(Err(Failure::Input(msg))) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Ok(Err(Failure::Invariant(msg))) => {
            eprintln!("internal invariant violated: {msg}");
            ExitCode::from(3)
        }
        Err(_) => {
            eprintln!("internal invariant violated: panic");
            ExitCode::from(3)
        }
    }
}
