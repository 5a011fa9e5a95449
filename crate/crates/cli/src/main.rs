//! `singlocus`: reproducible checks of dimension formulas for hypersurfaces
//! singular along low-degree subschemes.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 on usage,
//! input or size-guard errors.

mod commands;
mod grid;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use singlocus_core::FieldSpec;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("size guard: {0}")]
    Guard(String),
    #[error("input: {0}")]
    Input(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "singlocus", version, about = "Exact checks for hypersurfaces singular along low-degree subschemes")]
pub struct Cli {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Largest graded piece (number of monomials) an exact computation may use.
    #[arg(long, global = true, default_value_t = 5000)]
    pub max_columns: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Lemma {
    /// Codimension of forms singular along one b-plane.
    CodOneLin,
    /// Lower bound for forms singular along d b-planes through a (b-1)-plane.
    CodiDSpaces,
    /// Codimension of (f, x_{b+2}, ..., x_n)^2 equals beta.
    Explct,
    /// Forms singular along an integral quadric lie in the square of its ideal.
    SqOfIdeal,
    /// Dimension of the locus of forms singular along some b-plane.
    X1Accounting,
    /// The conjectural Hilbert scheme dimension specializes correctly at b = 1.
    B1Consistency,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compare exact oracles with closed-form counts over a parameter grid.
    CheckLemma {
        #[arg(value_enum)]
        lemma: Lemma,
        /// Grids accept `a` or `a..b` (inclusive).
        #[arg(long, default_value = "3")]
        n: String,
        #[arg(long, default_value = "1")]
        b: String,
        #[arg(long, default_value = "2")]
        d: String,
        #[arg(long, default_value = "4")]
        l: String,
        #[arg(long, default_value = "Q")]
        field: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random configurations (or random forms) per grid cell.
        #[arg(long, default_value_t = 5)]
        samples: usize,
        /// The quadric used by `sq-of-ideal`.
        #[arg(long, default_value = "x0*x2 - x1^2")]
        quadric: String,
    },
    /// Compute a certified threshold l0(n, b).
    L0 {
        #[arg(long)]
        n: i64,
        #[arg(long)]
        b: i64,
        /// Certify the second-component inequality instead.
        #[arg(long, conflicts_with = "fixed_b")]
        second_component: bool,
        /// Only degrees 2 <= d <= B.
        #[arg(long = "fixed-B", value_name = "B")]
        fixed_b: Option<i64>,
    },
    /// Replay a certificate written by `l0`.
    VerifyCertificate { file: PathBuf },
    /// Dimension of the forms singular along V(I) in degree l.
    Wspace {
        #[arg(long)]
        ideal: PathBuf,
        #[arg(long)]
        l: u32,
        #[arg(long, default_value = "Q")]
        field: String,
    },
    /// Codimension of a graded piece of an ideal, its square, or the
    /// squared ideal of a union of b-planes.
    Codim {
        #[arg(long, conflicts_with = "config", required_unless_present = "config")]
        ideal: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        l: u32,
        /// Use the square of the ideal.
        #[arg(long)]
        square: bool,
        #[arg(long, default_value = "Q")]
        field: String,
    },
    /// Evaluate beta_d(l); with `--oracle`, compare with an exact rank.
    Beta {
        #[arg(long)]
        n: i64,
        #[arg(long)]
        b: i64,
        #[arg(long)]
        d: i64,
        #[arg(long)]
        l: i64,
        #[arg(long)]
        oracle: bool,
        #[arg(long, default_value = "Q")]
        field: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Support of the flat limit of V(I) under x_j -> a x_j, a -> 0.
    Specialize {
        #[arg(long)]
        ideal: PathBuf,
        #[arg(long)]
        b: usize,
        #[arg(long)]
        q: u64,
        /// Expected number of points of V(I) ∩ V(x_{n-b+1}, ..., x_n).
        #[arg(long)]
        d: Option<usize>,
    },
    /// Sample forms from (I^2)_l and compare their singular points with V(I).
    GenericSing {
        #[arg(long)]
        ideal: PathBuf,
        #[arg(long)]
        l: u32,
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

pub fn parse_field(s: &str) -> Result<FieldSpec, CliError> {
    s.parse().map_err(|e| CliError::Usage(format!("--field {s}: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(report) => match output::emit(&report, cli.format, cli.out.as_deref()) {
            Ok(()) => match report.get("pass").and_then(|p| p.as_bool()) {
                Some(false) => ExitCode::from(1),
                _ => ExitCode::SUCCESS,
            },
            Err(e) => {
                eprintln!("singlocus: {e}");
                ExitCode::from(2)
            }
        },
        Err(e) => {
            eprintln!("singlocus: {e}");
            ExitCode::from(2)
        }
    }
}
