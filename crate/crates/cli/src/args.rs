use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "epigeom", version, about = "Rényi entropy powers, EPI exponents and star bodies of densities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Where to write the run manifest; defaults to `<out>.manifest.json` when `--out` is given.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,

    /// Seed for Monte Carlo estimates.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate the sharp exponent α(p) against the comparison bounds.
    Alpha(AlphaArgs),
    /// Rényi entropies and entropy powers of a density.
    Entropy(EntropyArgs),
    /// Sample a star body of a density on a direction set.
    Body(BodyArgs),
    /// Limit relations between the cosine and Radon transforms.
    TransformCheck(TransformArgs),
    /// Inequality, identity and convexity checks.
    Check(CheckArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct AlphaArgs {
    #[arg(long)]
    pub p_min: f64,
    #[arg(long)]
    pub p_max: f64,
    #[arg(long, default_value_t = 20)]
    pub steps: usize,
    /// Space the orders geometrically instead of linearly.
    #[arg(long)]
    pub log: bool,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EntropyArgs {
    #[arg(long)]
    pub density: PathBuf,
    /// Orders, comma separated; `inf` is accepted.
    #[arg(long, value_delimiter = ',', required = true)]
    pub p: Vec<f64>,
    /// Use a Monte Carlo estimate from this many samples.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BodyKind {
    #[value(name = "cross-section")]
    CrossSection,
    Intersection,
    #[value(name = "radial-mean")]
    RadialMean,
    Ball,
    #[value(name = "polar-centroid")]
    PolarCentroid,
    Z,
}

#[derive(Debug, Args)]
pub struct BodyArgs {
    #[arg(long, value_enum)]
    pub kind: BodyKind,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub density: PathBuf,
    #[arg(long)]
    pub directions: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TransformWhich {
    #[value(name = "tr-limit")]
    TrLimit,
    Zr,
    Zi,
    Cn1,
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    #[arg(long, value_enum)]
    pub which: TransformWhich,
    /// Without a density, `tr-limit` uses the constant function 1.
    #[arg(long)]
    pub density: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_values_t = [1e-1, 1e-2, 1e-3])]
    pub eps: Vec<f64>,
    /// Orders for `zr`.
    #[arg(long, value_delimiter = ',', default_values_t = [1.0])]
    pub p: Vec<f64>,
    #[arg(long, default_value_t = 32)]
    pub directions: usize,
    /// Fail (exit 2) when a relative gap exceeds this.
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckKind {
    Epi,
    Linearized,
    #[value(name = "reverse-epi")]
    ReverseEpi,
    #[value(name = "entropy-convexity")]
    EntropyConvexity,
    #[value(name = "identity-c1")]
    IdentityC1,
    #[value(name = "identity-rp")]
    IdentityRp,
    #[value(name = "identity-cminus1")]
    IdentityCminus1,
    #[value(name = "dct-lower")]
    DctLower,
    Convexity,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(value_enum)]
    pub kind: CheckKind,
    #[arg(long)]
    pub density: Option<PathBuf>,
    /// Second summand; defaults to an independent copy of `--density`.
    #[arg(long)]
    pub density2: Option<PathBuf>,
    #[arg(long)]
    pub p: Option<f64>,
    /// Exponent for `epi` and `linearized`; defaults to α(p).
    #[arg(long)]
    pub alpha: Option<f64>,
    /// λ values, comma separated; sweeps default to 21 points on [0, 1].
    #[arg(long, value_delimiter = ',')]
    pub lambda: Vec<f64>,
    #[arg(long)]
    pub directions: Option<usize>,
    /// Star body JSON for `convexity`.
    #[arg(long)]
    pub body: Option<PathBuf>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
