use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "bimeans",
    version,
    about = "Bivariate means and inequality verification"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true)]
    pub format: Option<OutputFormat>,
    /// Worker threads for sampling; results do not depend on it.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    /// Write the output to this file instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one mean.
    Eval(EvalArgs),
    /// Tabulate means over a range of b.
    Table(TableArgs),
    /// Search for counterexamples to catalog inequalities.
    Check(CheckArgs),
    /// Check monotonicity of A_k (f1) or (a^k + b^k)^(1/k) (f2) in k.
    Mono(MonoArgs),
    /// Compare analytic logarithmic derivatives with central differences.
    DerivCheck(DerivArgs),
    /// Gaps along b -> a or b/a -> infinity.
    Tightness(TightnessArgs),
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// arithmetic, geometric, heronian, identric, s, power[:k] or f2[:k].
    #[arg(long)]
    pub mean: String,
    #[arg(long, allow_negative_numbers = true)]
    pub a: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub b: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub k: Option<f64>,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    /// Comma-separated means, e.g. `arithmetic,power:0.5,identric`.
    #[arg(long, value_delimiter = ',', required = true)]
    pub means: Vec<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub a: f64,
    /// `lo:hi:steps`, evenly spaced and inclusive.
    #[arg(long)]
    pub b_range: SteppedRange,
    /// Order for `power` and `f2` entries given without one.
    #[arg(long, allow_negative_numbers = true)]
    pub k: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Inequality id, e.g. INEQ_2_4.
    #[arg(long, conflicts_with = "all", required_unless_present = "all")]
    pub ineq: Option<String>,
    /// Every catalog inequality and its sub-checks.
    #[arg(long)]
    pub all: bool,
    /// Random samples per inequality.
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "1e-3:1e3")]
    pub a_range: Range,
    #[arg(long, default_value = "1e-3:1e3")]
    pub b_range: Range,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    /// Grid points per axis.
    #[arg(long, default_value_t = 6)]
    pub grid: usize,
    /// Refinement rounds around the minimum.
    #[arg(long, default_value_t = 30)]
    pub refine: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    F1,
    F2,
}

#[derive(Debug, Args)]
pub struct MonoArgs {
    #[arg(long, value_enum)]
    pub target: Target,
    #[arg(long, allow_negative_numbers = true)]
    pub a: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub b: f64,
    /// Comma-separated, strictly increasing orders.
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        required = true
    )]
    pub k_grid: Vec<f64>,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct DerivArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub a: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub b: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub k: f64,
    #[arg(long, default_value_t = 1e-5)]
    pub h: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PathKind {
    Diagonal,
    Ratio,
}

#[derive(Debug, Args)]
pub struct TightnessArgs {
    #[arg(long)]
    pub ineq: String,
    #[arg(long, value_enum)]
    pub path: PathKind,
    #[arg(long, default_value_t = 6)]
    pub steps: u32,
    /// Starting point of the path.
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    /// Parameter overrides; defaults are the inequality's endpoint values.
    #[arg(long, allow_negative_numbers = true)]
    pub k: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub k2: Option<f64>,
}

/// `lo:hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
}

impl FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts = parse_floats(s)?;
        match parts[..] {
            [lo, hi] => Ok(Range { lo, hi }),
            _ => Err(format!("expected lo:hi, got {s:?}")),
        }
    }
}

/// `lo:hi:steps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteppedRange {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl FromStr for SteppedRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let bad = || format!("expected lo:hi:steps with steps >= 1, got {s:?}");
        let mut it = s.split(':');
        let (Some(lo), Some(hi), Some(steps), None) = (it.next(), it.next(), it.next(), it.next())
        else {
            return Err(bad());
        };
        let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
        let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
        let steps: usize = steps.trim().parse().map_err(|_| bad())?;
        if steps == 0 || !lo.is_finite() || !hi.is_finite() {
            return Err(bad());
        }
        Ok(SteppedRange { lo, hi, steps })
    }
}

impl SteppedRange {
    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.lo];
        }
        let n = self.steps - 1;
        (0..=n)
            .map(|i| {
                if i == n {
                    self.hi
                } else {
                    self.lo + (self.hi - self.lo) * i as f64 / n as f64
                }
            })
            .collect()
    }
}

fn parse_floats(s: &str) -> Result<Vec<f64>, String> {
    s.split(':')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| format!("{p:?} is not a number"))
        })
        .collect()
}
