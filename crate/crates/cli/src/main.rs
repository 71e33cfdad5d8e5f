//! `cuspcobord` command-line front end.
//!
//! Exit codes: 0 success or affirmative answer, 1 negative answer or
//! obstruction, 2 input or precondition error.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "cuspcobord", version, about = "Cusp-cobordism invariants, singular-pattern normalization and normal-form traces")]
pub struct Cli {
    /// Emit machine-readable JSON (sorted keys) instead of key=value lines.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// chi_plus, chi_M and the cobordism class of a descriptor.
    Invariant { file: PathBuf },
    /// Whether two descriptors are cusp-cobordant.
    Cobordant { first: PathBuf, second: PathBuf },
    /// Parity/equality condition for a non-singular extension.
    Extendable {
        file: PathBuf,
        /// Sign assignment overriding the stored signs.
        #[arg(long)]
        sigma: Option<PathBuf>,
    },
    /// Singular-pattern validation, predicates and normalization.
    Pattern {
        #[command(subcommand)]
        action: PatternAction,
    },
    /// Detect and draw the singular set of a local normal form.
    Trace(TraceArgs),
}

#[derive(Debug, Args)]
pub struct PatternOptions {
    pub pattern: PathBuf,
    /// Sign assignment; defaults to the signs stored on the boundary points.
    #[arg(long)]
    pub sigma: Option<PathBuf>,
    /// Euler characteristic of the ambient manifold; defaults to `chi_ambient`.
    #[arg(long = "chi-v", allow_negative_numbers = true)]
    pub chi_v: Option<i64>,
}

#[derive(Debug, Subcommand)]
pub enum PatternAction {
    Validate {
        pattern: PathBuf,
    },
    Check {
        #[command(flatten)]
        opts: PatternOptions,
    },
    Normalize {
        #[command(flatten)]
        opts: PatternOptions,
        /// Treat every matching pair as removable (needed when n = 2).
        #[arg(long)]
        assume_removable: bool,
        /// Write the move trace JSON here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TraceKind {
    Swallowtail,
    PerturbedFold,
    Fold,
    Cusp,
}

#[derive(Debug, Args)]
pub struct TraceArgs {
    #[arg(value_enum)]
    pub kind: TraceKind,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub t: f64,
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// Quadratic-form index (`k` for the cusp).
    #[arg(long, default_value_t = 0)]
    pub i: usize,
    #[arg(long, default_value = "-2:2:41,-2.5:2.5:11")]
    pub grid: String,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha_center: f64,
    #[arg(long, default_value_t = 1.0)]
    pub alpha_radius: f64,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub alpha_amp: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub beta_center: f64,
    #[arg(long, default_value_t = 2.0)]
    pub beta_radius: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub beta_amp: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub margin: f64,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the JSON run manifest.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long, conflicts_with = "csv")]
    pub svg: bool,
    #[arg(long)]
    pub csv: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(out.code)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}
