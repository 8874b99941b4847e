use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "chainlet", version, about = "Chainlet calculus: verify integral theorems, bound norms, generate domains")]
pub struct Cli {
    /// Worker threads; overrides CHAINLET_JOBS. Defaults to the number of cores.
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    pub jobs: Option<u32>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compare both sides of an integral theorem level by level.
    Verify {
        #[arg(value_enum)]
        theorem: Theorem,
        #[command(flatten)]
        input: Input,
        /// Form name from the built-in dictionary or a JSON form file.
        #[arg(long)]
        form: String,
        /// Approximation levels 1..=N.
        #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u32).range(1..=16))]
        levels: u32,
        /// Pass tolerance; the default depends on the theorem.
        #[arg(long, value_parser = positive)]
        tol: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Bracket a natural norm or bound the flat norm.
    Norm {
        #[arg(value_enum)]
        kind: NormKind,
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 1)]
        r: usize,
        /// Decomposition JSON checked and evaluated instead of searching (natural),
        /// or the 2-chain C of a hint P = B + ∂C (flat).
        #[arg(long)]
        hint: Option<PathBuf>,
        /// The chain B of a flat hint; zero when omitted.
        #[arg(long)]
        hint_b: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Write a generated domain as chain JSON.
    Generate {
        #[arg(value_enum)]
        domain: Domain,
        #[arg(long, default_value_t = 0)]
        level: u32,
        /// Koch side length.
        #[arg(long, default_value_t = 1.0, value_parser = positive)]
        side: f64,
        /// Weierstrass amplitude ratio.
        #[arg(long, default_value_t = 0.5)]
        a: f64,
        /// Weierstrass frequency ratio.
        #[arg(long, default_value_t = 3.0)]
        b: f64,
        /// Weierstrass truncation.
        #[arg(long, default_value_t = 6)]
        terms: u32,
        /// qcube: subtract the cube chain at this level.
        #[arg(long)]
        minus_level: Option<u32>,
        /// qcube ambient dimension.
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// qcube grade.
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Koch: also write the region between this level and the next.
        #[arg(long)]
        region_out: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Integrate a form over a chain.
    Integrate {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        form: String,
        #[arg(long, default_value_t = 1e-10, value_parser = positive)]
        tol: f64,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Debug, Args)]
pub struct Input {
    /// Chain JSON file or a built-in chain name.
    #[arg(long)]
    pub chain: String,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Output file; `.csv` selects CSV, anything else JSON. Stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Theorem {
    Stokes,
    Star,
    Gauss,
    Green,
    Laplace,
    Distribution,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormKind {
    Natural,
    Flat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Domain {
    Koch,
    Weierstrass,
    Qcube,
    Disk,
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        Ok(_) => Err("must be positive".into()),
        Err(e) => Err(e.to_string()),
    }
}

impl Theorem {
    pub fn default_tol(self) -> f64 {
        match self {
            Theorem::Stokes => 1e-8,
            Theorem::Laplace => 0.05,
            Theorem::Distribution => 1e-6,
            Theorem::Star | Theorem::Gauss | Theorem::Green => 0.02,
        }
    }
}
