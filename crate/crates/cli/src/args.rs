use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Deserialize;

use crate::config::Overrides;

fn complex_arg(s: &str) -> Result<Complex64, String> {
    crate::spec::parse_complex(s).map_err(|e| e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "hm", version, about = "Invariance checks for composition operators on model spaces and Beurling subspaces of H²")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// TOML file with RunConfig fields.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Starting truncation degree (at most 1024).
    #[arg(long, global = true)]
    pub truncation: Option<usize>,
    #[arg(long, global = true)]
    pub tol_accept: Option<f64>,
    #[arg(long, global = true)]
    pub tol_reject: Option<f64>,
    /// Boundary samples for sup-norm estimates.
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Directory for JSON reports (overrides HM_OUTPUT_DIR).
    #[arg(long, global = true)]
    pub output_dir: Option<PathBuf>,
}

impl GlobalArgs {
    pub fn overrides(&self) -> Overrides {
        Overrides {
            truncation: self.truncation,
            tol_accept: self.tol_accept,
            tol_reject: self.tol_reject,
            samples: self.samples,
            seed: self.seed,
            output_dir: self.output_dir.clone(),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide invariance of θH², Q_θ, or whether Q_θ reduces C_φ.
    Check(CheckArgs),
    /// Run one of the theorem harnesses.
    Theorem {
        #[command(subcommand)]
        id: TheoremCmd,
    },
    /// Cross-check the Cowen and Shapiro adjoint formulas for an LFT symbol.
    Adjoint(AdjointArgs),
}

impl Command {
    /// Command words used in reports and output file names.
    pub fn name(&self) -> String {
        match self {
            Command::Check(a) => {
                let s = format!("check {}", a.subject.as_str());
                if a.batch.is_some() {
                    s + " batch"
                } else {
                    s
                }
            }
            Command::Theorem { id } => format!("theorem {}", id.name()),
            Command::Adjoint(_) => "adjoint".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Subject {
    /// θH² under C_φ.
    Beurling,
    /// The model space Q_θ under C_φ.
    Model,
    /// Whether Q_θ reduces C_φ.
    Reducing,
}

impl Subject {
    pub fn as_str(self) -> &'static str {
        match self {
            Subject::Beurling => "beurling",
            Subject::Model => "model",
            Subject::Reducing => "reducing",
        }
    }
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    pub subject: Subject,
    /// Blaschke product, e.g. "zeros:[(0,0,1),(0.5,0,1)]".
    #[arg(long, required_unless_present = "batch", conflicts_with = "batch")]
    pub theta: Option<String>,
    /// Symbol, e.g. "lft:2,0,-1,4" or "poly:0,0,1".
    #[arg(long, required_unless_present = "batch", conflicts_with = "batch", allow_hyphen_values = true)]
    pub phi: Option<String>,
    /// TOML file with [[case]] tables (theta, phi, optional subject and label).
    #[arg(long)]
    pub batch: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AdjointArgs {
    /// Linear fractional symbol.
    #[arg(long, allow_hyphen_values = true)]
    pub phi: String,
    /// Also write both sides of the Cowen factorization to this JSON file.
    #[arg(long)]
    pub export_sections: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum TheoremCmd {
    /// Affine symbols on Q_{b_α^n}.
    Affine {
        #[arg(long, default_value = "0", value_parser = complex_arg, allow_hyphen_values = true)]
        alpha: Complex64,
        #[arg(long, default_value_t = 3)]
        n: u32,
        #[arg(long, default_value_t = 50)]
        trials: usize,
    },
    /// Möbius family keeping Q_{z·b_α} invariant.
    #[command(name = "mobius-family", alias = "example35")]
    MobiusFamily {
        #[arg(long, default_value = "0.5", value_parser = complex_arg, allow_hyphen_values = true)]
        alpha: Complex64,
        #[arg(long, default_value = "1", value_parser = complex_arg, allow_hyphen_values = true)]
        c1: Complex64,
        #[arg(long, default_value = "-0.25", value_parser = complex_arg, allow_hyphen_values = true)]
        c2: Complex64,
    },
    /// Affine φ = az + b on Q_θ against θH² under its companion σ.
    Flt {
        #[arg(long, default_value = "zeros:[(0,0,1),(0.5,0,1)]")]
        theta: String,
        #[arg(long, default_value = "0.5", value_parser = complex_arg, allow_hyphen_values = true)]
        a: Complex64,
        #[arg(long, default_value = "0.25", value_parser = complex_arg, allow_hyphen_values = true)]
        b: Complex64,
    },
    /// LFT symbols on Q_θ with θ(0) = 0.
    Modelinv {
        #[arg(long, default_value = "zeros:[(0,0,1),(0.5,0,1)]")]
        theta: String,
        #[arg(long, default_value = "lft:2,0,-1,4", allow_hyphen_values = true)]
        phi: String,
    },
    /// Constant symbols on Q_θ.
    Constant {
        #[arg(long, default_value = "zeros:[(0,0,2)]")]
        theta: String,
        #[arg(long, default_value = "0.3", value_parser = complex_arg, allow_hyphen_values = true)]
        c: Complex64,
    },
    /// Only trivial symbols keep every θH² or every Q_θ.
    Rigidity {
        #[arg(long, default_value = "poly:0,0,1", allow_hyphen_values = true)]
        phi: String,
        /// Seeded random probe points added to the fixed grid.
        #[arg(long, default_value_t = 4)]
        random: usize,
    },
    /// Reducing subspaces Q_{b_α^n}.
    Reducing {
        #[arg(long, default_value = "0", value_parser = complex_arg, allow_hyphen_values = true)]
        alpha: Complex64,
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[arg(long, default_value = "poly:0,0.333,0.333", allow_hyphen_values = true)]
        phi: String,
    },
    /// Exploratory search for symbols keeping Q_{b_α b_β} invariant.
    Q1 {
        #[arg(long, default_value = "0.3", value_parser = complex_arg, allow_hyphen_values = true)]
        alpha: Complex64,
        #[arg(long, default_value = "0.6", value_parser = complex_arg, allow_hyphen_values = true)]
        beta: Complex64,
        #[arg(long, default_value_t = 9)]
        grid: usize,
        #[arg(long, default_value_t = 8)]
        refine: usize,
        #[arg(long, default_value_t = 8)]
        random_starts: usize,
        #[arg(long, default_value_t = 1e-8)]
        solution_tol: f64,
    },
}

impl TheoremCmd {
    pub fn name(&self) -> &'static str {
        match self {
            TheoremCmd::Affine { .. } => "affine",
            TheoremCmd::MobiusFamily { .. } => "mobius-family",
            TheoremCmd::Flt { .. } => "flt",
            TheoremCmd::Modelinv { .. } => "modelinv",
            TheoremCmd::Constant { .. } => "constant",
            TheoremCmd::Rigidity { .. } => "rigidity",
            TheoremCmd::Reducing { .. } => "reducing",
            TheoremCmd::Q1 { .. } => "q1",
        }
    }
}
