//! `cmdiv` command-line front end.
//!
//! Every run writes one JSON document (stdout or `--out`). Exit status: 0 for
//! affirmative verdicts, 1 for negative ones, 2 for usage or input errors.

mod commands;
mod input;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgMatches, Args, CommandFactory, FromArgMatches, Parser, Subcommand};
use serde::Serialize;

use cmdiv::cm::DEFAULT_REL_TOL;
use cmdiv::scan::DEFAULT_STEP;

#[derive(Parser, Debug)]
#[command(name = "cmdiv", version, about = "Completely monotone lattice functions and fractional powers of random sets")]
struct Cli {
    #[command(flatten)]
    config: RunConfig,
    #[command(subcommand)]
    command: Command,
}

/// Settings shared by all subcommands; echoed into every output document.
#[derive(Args, Debug, Clone, Serialize)]
pub struct RunConfig {
    /// Seed for `random:N` distributions and random functions.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Relative tolerance for float c.m. checks.
    #[arg(long, global = true, default_value_t = DEFAULT_REL_TOL)]
    pub rel_tol: f64,
    /// Grid step for scans.
    #[arg(long, global = true, default_value_t = DEFAULT_STEP)]
    pub step: f64,
    /// Upper end of the scan domain (default `n + 1`).
    #[arg(long, global = true)]
    pub t_max: Option<f64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Read function and void files as floats instead of exact rationals.
    #[arg(long, global = true)]
    pub float: bool,
    /// JSON output path (default stdout).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// CSV output path for grids and tables.
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Lattice inspection and construction.
    #[command(subcommand)]
    Lattice(LatticeCmd),
    /// Complete monotonicity of lattice functions.
    #[command(subcommand)]
    Cm(CmCmd),
    /// Random subsets of a finite ground set.
    #[command(subcommand)]
    Randset(RandsetCmd),
    /// The set of exponents with an existing power.
    #[command(subcommand)]
    Scan(ScanCmd),
    /// Approximation by infinitely divisible objects.
    #[command(subcommand)]
    Approx(ApproxCmd),
    /// Completely monotone sequences.
    #[command(subcommand)]
    Cmseq(CmseqCmd),
}

#[derive(Subcommand, Debug)]
pub enum LatticeCmd {
    /// Validate a lattice and report its structure.
    Check {
        /// Lattice file or built-in name (`boolean3`, `diamond3`, `chain2xboolean2`, ...).
        #[arg(long)]
        lattice: String,
    },
    /// Build a named lattice in the text format.
    Make {
        #[arg(long)]
        name: String,
        /// Also write the lattice file here.
        #[arg(long)]
        write: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
pub enum CmCmd {
    /// Decide complete monotonicity via Möbius weights.
    Check {
        /// Defaults to the function file's `lattice` header.
        #[arg(long)]
        lattice: Option<String>,
        /// Function file, or `random` for a seeded random function.
        #[arg(long = "fn")]
        function: String,
        /// Cross-check by enumerating all iterated differences.
        #[arg(long)]
        bruteforce: bool,
    },
    /// Decide complete monotonicity of `f^alpha`.
    Power {
        #[arg(long)]
        lattice: Option<String>,
        #[arg(long = "fn")]
        function: String,
        #[arg(long)]
        alpha: f64,
    },
    /// Extend a c.m. function from a sublattice to the host lattice.
    Extend {
        #[arg(long)]
        lattice: String,
        /// Comma-separated host elements forming the sublattice.
        #[arg(long, value_delimiter = ',')]
        elements: Vec<usize>,
        /// Function on the sublattice, keyed by host element.
        #[arg(long = "fn")]
        function: String,
        #[arg(long)]
        write: Option<PathBuf>,
    },
    /// Poisson accompaniment `exp(-m (1 - f^{1/m}))`.
    Accompany {
        #[arg(long)]
        lattice: Option<String>,
        #[arg(long = "fn")]
        function: String,
        #[arg(long)]
        m: u32,
    },
}

#[derive(Subcommand, Debug)]
pub enum RandsetCmd {
    /// Void functional table.
    Void {
        /// Distribution file, `uniform-singleton:N`, `singleton:p1,...`, `empty:N`, `two-point:M` or `random:N`.
        #[arg(long)]
        dist: String,
        #[arg(long)]
        write: Option<PathBuf>,
    },
    /// Recover the distribution from a void functional file.
    Invert {
        #[arg(long)]
        void: PathBuf,
        #[arg(long)]
        write: Option<PathBuf>,
    },
    /// Decide whether the power `X_alpha` exists.
    PowerExists {
        #[arg(long)]
        dist: String,
        #[arg(long)]
        alpha: f64,
    },
    /// Union of `m` independent copies.
    Union {
        #[arg(long)]
        dist: String,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        write: Option<PathBuf>,
    },
    /// Union of a Poisson(`lambda`) number of independent copies.
    Poisson {
        #[arg(long)]
        dist: String,
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        write: Option<PathBuf>,
    },
    /// Print a distribution in the exchange format.
    Dist {
        #[arg(long)]
        dist: String,
        #[arg(long)]
        write: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
pub enum ScanCmd {
    /// Map the exponent set on `[0, t_max]`.
    SSet {
        #[arg(long)]
        dist: String,
    },
    /// Exchangeable random set whose exponent set has several intervals.
    MultiInterval {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    /// Schur condition `(x1 - x2)(df/dx1 - df/dx2)` for the simplex function.
    Schur {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        alpha: f64,
        #[arg(long, value_delimiter = ',')]
        x: Vec<f64>,
        /// Finite-difference step (default: min(1e-5, half the distance to the boundary)).
        #[arg(long)]
        h: Option<f64>,
    },
}

#[derive(Subcommand, Debug)]
pub enum ApproxCmd {
    /// Distance bounds to the infinitely divisible class.
    Psi {
        #[arg(long, conflicts_with = "m_list")]
        m: Option<u32>,
        #[arg(long, value_delimiter = ',')]
        m_list: Vec<u32>,
    },
}

#[derive(Subcommand, Debug)]
pub enum CmseqCmd {
    /// Hankel test for `((1 + x^k)/2)^alpha`.
    Hankel {
        #[arg(long, required_unless_present = "y", conflicts_with = "y")]
        x: Option<f64>,
        /// Use `x = e^{-y}` (integer samples of `(1 + e^{-ty})/2`).
        #[arg(long)]
        y: Option<f64>,
        #[arg(long)]
        alpha: f64,
        /// Check a single order instead of searching.
        #[arg(long)]
        order: Option<usize>,
        #[arg(long, default_value_t = cmdiv::moments::ORDER_CAP)]
        cap: usize,
    },
}

/// Full subcommand path, e.g. `randset power-exists`.
fn command_path(mut m: &ArgMatches) -> String {
    let mut parts = Vec::new();
    while let Some((name, sub)) = m.subcommand() {
        parts.push(name.to_string());
        m = sub;
    }
    parts.join(" ")
}

fn main() -> ExitCode {
    let matches = Cli::command().get_matches();
    let cli = Cli::from_arg_matches(&matches).unwrap_or_else(|e| e.exit());
    let name = command_path(&matches);
    if let Some(t) = cli.config.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: --threads: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match &cli.command {
        Command::Lattice(c) => commands::lattice(c, &cli.config),
        Command::Cm(c) => commands::cm(c, &cli.config),
        Command::Randset(c) => commands::randset(c, &cli.config),
        Command::Scan(c) => commands::scan(c, &cli.config),
        Command::Approx(c) => commands::approx(c, &cli.config),
        Command::Cmseq(c) => commands::cmseq(c, &cli.config),
    };
    match result.and_then(|report| output::emit(&name, &cli.config, report)) {
        Ok(affirmative) => ExitCode::from(if affirmative { 0 } else { 1 }),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
