use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use coreset_bounds::{Architecture, DeskConfig, ExponentVariant, LossKind};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "coreset", version, about = "Coreset risk bounds for Bayesian posteriors over convex classes of data distributions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Generate a dataset, train a reference model, build its posterior and sample losses
    Gen(GenArgs),
    /// Build the coreset for a loss matrix and evaluate both bound terms
    Bound(BoundArgs),
    /// Bound a loss matrix and cross-check the result against independent oracles
    Verify(VerifyArgs),
    /// Retrain and bound at a list of nested training checkpoints
    Sweep(SweepArgs),
    /// Summarize bound or verify reports as CSV
    Report(ReportArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VariantArg {
    Appendix,
    Theorem,
}

impl From<VariantArg> for ExponentVariant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Appendix => ExponentVariant::Appendix,
            VariantArg::Theorem => ExponentVariant::TheoremText,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ArchArg {
    Logistic,
    Mlp,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LossArg {
    ZeroOne,
    CrossEntropy,
}

impl From<LossArg> for LossKind {
    fn from(v: LossArg) -> Self {
        match v {
            LossArg::ZeroOne => LossKind::ZeroOne,
            LossArg::CrossEntropy => LossKind::CrossEntropy,
        }
    }
}

/// Data, model and posterior settings shared by `gen` and `sweep`.
#[derive(Args, Debug, Serialize)]
pub struct DeskArgs {
    /// Dataset CSV with the label in the last column; synthetic blobs when absent
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long, default_value_t = 200)]
    pub n_data: usize,
    #[arg(long, default_value_t = 2)]
    pub n_features: usize,
    /// Distance between the two blob centres
    #[arg(long, default_value_t = 3.0)]
    pub separation: f64,
    /// Redraw synthetic points closer than this to the class boundary
    #[arg(long)]
    pub margin: Option<f64>,
    #[arg(long, value_enum, default_value_t = ArchArg::Logistic)]
    pub arch: ArchArg,
    /// Hidden units of the MLP architecture
    #[arg(long, default_value_t = 8)]
    pub hidden: usize,
    #[arg(long, default_value_t = 200)]
    pub epochs: usize,
    #[arg(long, default_value_t = 0.5)]
    pub lr: f64,
    /// Upper bound on every posterior standard deviation
    #[arg(long, default_value_t = 1e-4)]
    pub prior_std: f64,
    /// Posterior draws J
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, value_enum, default_value_t = LossArg::ZeroOne)]
    pub loss: LossArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl DeskArgs {
    pub fn desk_config(&self, bound: Option<&BoundSettings>) -> DeskConfig {
        let architecture = match self.arch {
            ArchArg::Logistic => Architecture::Logistic,
            ArchArg::Mlp => Architecture::Mlp { hidden: self.hidden },
        };
        let mut cfg = DeskConfig {
            n_data: self.n_data,
            n_features: self.n_features,
            separation: self.separation,
            margin: self.margin,
            architecture,
            epochs: self.epochs,
            learning_rate: self.lr,
            prior_std: self.prior_std,
            n_samples: self.samples,
            loss_kind: self.loss.into(),
            seed: self.seed,
            ..DeskConfig::default()
        };
        if let Some(b) = bound {
            cfg.fw_iters = b.fw_iters;
            cfg.xi = b.xi;
            cfg.delta = b.delta;
            cfg.variant = b.variant.into();
        }
        cfg
    }
}

/// Coreset and bound settings shared by `bound`, `verify` and `sweep`.
#[derive(Args, Debug, Serialize)]
pub struct BoundSettings {
    /// Frank-Wolfe iterations m; defaults to the training checkpoint size
    #[arg(long)]
    pub fw_iters: Option<usize>,
    /// Range constant of the loss products; 0.5 for zero-one losses, half the observed range otherwise
    #[arg(long)]
    pub xi: Option<f64>,
    /// Failure probability of the projection bound
    #[arg(long, default_value_t = 0.05)]
    pub delta: f64,
    #[arg(long, value_enum, default_value_t = VariantArg::Appendix)]
    pub variant: VariantArg,
}

#[derive(Args, Debug, Serialize)]
pub struct GenArgs {
    #[command(flatten)]
    pub desk: DeskArgs,
    /// Train on the first this many points; all points when absent
    #[arg(long)]
    pub checkpoint: Option<usize>,
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
#[command(group(ArgGroup::new("hull_source").required(true).args(["hull", "uniform"])))]
pub struct BoundArgs {
    /// Loss matrix in LMAT format
    #[arg(long)]
    pub lmat: PathBuf,
    /// JSON file listing the hull vertices
    #[arg(long)]
    pub hull: Option<PathBuf>,
    /// Use the uniform distribution as the only hull vertex
    #[arg(long)]
    pub uniform: bool,
    /// Reference model JSON; its training size is the default m
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Training checkpoint size, used as the default m
    #[arg(long)]
    pub checkpoint: Option<usize>,
    #[command(flatten)]
    pub bound: BoundSettings,
    /// Recorded in the report
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory; the report goes to stdout when absent
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub bound: BoundArgs,
    /// Lattice steps per barycentric coordinate for the hull grid search
    #[arg(long, default_value_t = 25)]
    pub grid_resolution: usize,
    /// Random directions for the support-function radius bound
    #[arg(long, default_value_t = 20_000)]
    pub boundary_samples: usize,
    /// Absolute tolerance of the oracle comparisons
    #[arg(long, default_value_t = 1e-10)]
    pub tolerance: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct SweepArgs {
    #[command(flatten)]
    pub desk: DeskArgs,
    #[command(flatten)]
    pub bound: BoundSettings,
    /// Comma-separated training sizes
    #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
    pub checkpoints: Vec<usize>,
    /// Output directory; the CSV goes to stdout when absent
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ReportArgs {
    /// Report JSON files written by `bound` or `verify`
    #[arg(required = true)]
    pub reports: Vec<PathBuf>,
    /// Output directory; the CSV goes to stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
}
