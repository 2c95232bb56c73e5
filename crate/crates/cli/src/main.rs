//! `walker-kit`: batch driver for the walker-core checks.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "walker-kit",
    version,
    about = "Verification driver for Einstein Walker metrics and their symmetry reductions"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalOpts {
    /// Seed for every sampled check.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Relative tolerance of numeric zero tests.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// Sample count for numeric probes and on-shell jets.
    #[arg(long, global = true, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, global = true, value_enum, default_value_t = ReportFormat::Text)]
    pub report: ReportFormat,
    /// Catalog file (JSON lines) used instead of the built-in catalog.
    #[arg(long, global = true)]
    pub catalog: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeArg {
    Symbolic,
    Numeric,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum MetricFormat {
    Text,
    Latex,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConventionArg {
    Plus,
    Minus,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Commutator table of X1..X7 with antisymmetry and Jacobi checks.
    Brackets,
    /// Adjoint matrix Ad(exp(s X_i)).
    Adjoint {
        #[arg(long)]
        gen: usize,
        /// Group parameter: a number or an expression in parameters.
        #[arg(long, allow_hyphen_values = true)]
        s: String,
        /// Sign convention; chosen by replaying the classification when omitted.
        #[arg(long, value_enum)]
        convention: Option<ConventionArg>,
        /// Also replay the normalisation steps of the classification.
        #[arg(long)]
        replay: bool,
    },
    /// Parse a subalgebra given as generators separated by `;` or `,`.
    Subalgebra {
        #[arg(long, allow_hyphen_values = true)]
        gens: String,
        #[arg(long)]
        check_closed: bool,
    },
    /// Certify X1..X7 as symmetries of the reduced system at on-shell jets.
    Symmetries,
    /// Einstein check of a Walker metric.
    Einstein {
        #[arg(long, allow_hyphen_values = true, requires_all = ["b", "c"], conflicts_with = "entry")]
        a: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        b: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        c: Option<String>,
        #[arg(long)]
        entry: Option<String>,
    },
    /// Verify catalog entries.
    Verify {
        #[arg(long, conflicts_with = "all", required_unless_present = "all")]
        entry: Option<String>,
        #[arg(long)]
        all: bool,
        #[arg(long, value_enum, default_value_t = ModeArg::Symbolic)]
        mode: ModeArg,
    },
    /// Defect of each solution of an entry.
    Defect {
        #[arg(long)]
        entry: String,
    },
    /// One-parameter subgroups leaving each solution of an entry invariant.
    Reducibility {
        #[arg(long)]
        entry: String,
    },
    /// Compare the Einstein condition with the full system at sampled jets.
    EquivalenceProbe,
    /// Print the metric of an entry's solution.
    EmitMetric {
        #[arg(long)]
        entry: String,
        #[arg(long, value_enum, default_value_t = MetricFormat::Text)]
        format: MetricFormat,
    },
    /// List catalog entries, optionally writing them to a file.
    Catalog {
        #[arg(long)]
        save: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("walker-kit: {e}");
            ExitCode::from(2)
        }
    }
}
