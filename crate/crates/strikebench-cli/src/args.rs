use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

/// Strikingness-aware evaluation toolkit for temporal knowledge graph
/// forecasting.
#[derive(Debug, Parser)]
#[command(name = "strikebench", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load, validate, and normalize a dataset directory.
    Ingest(IngestArgs),
    /// Mine length-1 temporal rules from the training split.
    MineRules(MineArgs),
    /// Score a query split with a strikingness measure.
    Strikingness(StrikingnessArgs),
    /// Emit recency/frequency baseline predictions.
    PredictRecurrency(RecurrencyArgs),
    /// Rank predictions and compute original + weighted metrics.
    Evaluate(EvaluateArgs),
    /// Fuse two prediction sets with a validation-tuned mixing weight.
    Ensemble(EnsembleArgs),
    /// Per-bin, multi-model, and significance analyses over saved ranks.
    Report(ReportArgs),
}

/// Options shared by every dataset-consuming command.
#[derive(Debug, Args, Clone)]
pub struct CommonArgs {
    /// Dataset directory (fallback: $STRIKEBENCH_DATA_DIR)
    #[arg(long)]
    pub data_dir: Option<PathBuf>,
    /// TOML file with default parameter values (flags take precedence)
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Divide raw timestamps by this factor [default: 1]
    #[arg(long)]
    pub time_divisor: Option<u64>,
    /// Descriptive time granularity recorded in outputs
    #[arg(long)]
    pub granularity: Option<String>,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Output directory for the normalized dataset
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct MineArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Output rules file (JSON Lines)
    #[arg(long)]
    pub out: PathBuf,
    /// Minimum rule confidence [default: 0.01]
    #[arg(long)]
    pub tau: Option<f64>,
    /// Minimum body occurrences per rule [default: 2]
    #[arg(long)]
    pub min_body_support: Option<u64>,
    /// Cap on counted body occurrences per body relation (seeded sampling)
    #[arg(long)]
    pub sample_cap: Option<usize>,
    /// Sampling seed [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct StrikingnessArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Mined rules file (required for the rsmf measure)
    #[arg(long)]
    pub rules: Option<PathBuf>,
    /// Output strikingness table (TSV)
    #[arg(long)]
    pub out: PathBuf,
    /// Query split to score [default: test]
    #[arg(long)]
    pub split: Option<String>,
    /// History window in time steps, or "full" [default: full]
    #[arg(long)]
    pub window: Option<String>,
    /// Temporal decay coefficient [default: 0.1]
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Element weights subject,object,relation [default: 0.4,0.4,0.2]
    #[arg(long)]
    pub alpha: Option<String>,
    /// Facts visible when grounding: train-only | all-before-t
    /// [default: all-before-t]
    #[arg(long)]
    pub history_scope: Option<String>,
    /// Measure: rsmf | freq_inv | temp_inv [default: rsmf]
    #[arg(long)]
    pub measure: Option<String>,
    /// Decay for the temp_inv measure [default: 0.005]
    #[arg(long)]
    pub lambda_temp: Option<f64>,
    /// Worker threads [default: all cores]
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct RecurrencyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Output predictions file (JSON Lines)
    #[arg(long)]
    pub out: PathBuf,
    /// Query split to predict [default: test]
    #[arg(long)]
    pub split: Option<String>,
    /// Comma-separated recency decay candidates
    /// [default: 0.5,0.7,0.9,0.95,0.99,1.0]
    #[arg(long)]
    pub grid_xi: Option<String>,
    /// Comma-separated blend candidates [default: 0.0,0.1,...,1.0]
    #[arg(long)]
    pub grid_kappa: Option<String>,
    /// Fixed decay (skips tuning when --kappa is also given)
    #[arg(long)]
    pub xi: Option<f64>,
    /// Fixed blend (skips tuning when --xi is also given)
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Write the validation grid scan as JSON
    #[arg(long)]
    pub scan_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Predictions file (JSON Lines or dense binary with sidecar)
    #[arg(long)]
    pub preds: PathBuf,
    /// Output report (JSON)
    #[arg(long)]
    pub out: PathBuf,
    /// Strikingness table; omitting it yields an original-metrics-only
    /// report
    #[arg(long)]
    pub sk: Option<PathBuf>,
    /// Weighting bias [default: 0.1]
    #[arg(long)]
    pub b: Option<f64>,
    /// Tie policy: optimistic | realistic | pessimistic
    /// [default: realistic]
    #[arg(long)]
    pub tie_policy: Option<String>,
    /// Query split the predictions cover [default: test]
    #[arg(long)]
    pub split: Option<String>,
    /// Also write the per-query rank table (TSV)
    #[arg(long)]
    pub ranks_out: Option<PathBuf>,
    /// Also write per-bin metrics (CSV)
    #[arg(long)]
    pub bins_out: Option<PathBuf>,
    /// Strikingness bin width for --bins-out [default: 0.1]
    #[arg(long)]
    pub group_width: Option<f64>,
    /// Worker threads for rank computation [default: all cores]
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EnsembleArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// First model's test predictions
    #[arg(long)]
    pub a: PathBuf,
    /// Second model's test predictions
    #[arg(long)]
    pub b: PathBuf,
    /// First model's validation predictions
    #[arg(long)]
    pub valid_a: PathBuf,
    /// Second model's validation predictions
    #[arg(long)]
    pub valid_b: PathBuf,
    /// Output fused test predictions (JSON Lines)
    #[arg(long)]
    pub out: PathBuf,
    /// Validation metric to maximize: mrr | wmrr [default: mrr]
    #[arg(long)]
    pub metric: Option<String>,
    /// Mixing-weight grid step [default: 0.1]
    #[arg(long)]
    pub grid_step: Option<f64>,
    /// Per-query normalization: minmax | l2 | none [default: minmax]
    #[arg(long)]
    pub norm: Option<String>,
    /// Validation strikingness table (required for --metric wmrr)
    #[arg(long)]
    pub sk_valid: Option<PathBuf>,
    /// Weighting bias for wmrr [default: 0.1]
    #[arg(long)]
    pub bias_b: Option<f64>,
    /// Tie policy for validation ranking [default: realistic]
    #[arg(long)]
    pub tie_policy: Option<String>,
    /// Write the grid scan as JSON
    #[arg(long)]
    pub scan_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Rank table(s) produced by `evaluate --ranks-out`; repeatable
    #[arg(long, required = true)]
    pub ranks: Vec<PathBuf>,
    /// Output directory for the report artifacts
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Strikingness bin width [default: 0.1]
    #[arg(long)]
    pub group_width: Option<f64>,
    /// Rank cutoff for the n-model intersection table [default: 3]
    #[arg(long)]
    pub nmodel_k: Option<u64>,
    /// Significance thresholds "low,high": compare rows with sk < low
    /// against rows with sk > high
    #[arg(long)]
    pub significance: Option<String>,
    /// Also write per-query neighborhood overlap (needs --data-dir)
    #[arg(long)]
    pub nof: bool,
    /// Window for neighborhood overlap, or "full" [default: full]
    #[arg(long)]
    pub window: Option<String>,
    /// Query split the ranks cover [default: test]
    #[arg(long)]
    pub split: Option<String>,
}
