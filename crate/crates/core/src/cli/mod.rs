//! The `roomcast` command-line front end.
//!
//! Every subcommand reads the same flat configuration, runs one stage of the
//! pipeline and writes its artifacts plus a `manifest.json` into a fresh
//! output directory. Exit codes: 0 success, 2 usage or configuration error,
//! 3 data error, 4 numeric failure.

mod commands;
pub mod config;
pub mod output;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use config::{apply_text, default_settings, DataSource, PipelineConfig};
pub use output::{sha256_hex, Artifact, Output, MANIFEST_FILE};

use crate::error::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "roomcast", version, about = "Room-temperature forecasting and model explanation")]
pub struct Cli {
    /// Configuration file of `key = value` lines.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Global seed; overrides `seed` from the configuration.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory; must be absent or empty.
    #[arg(long, global = true, value_name = "DIR", default_value = "roomcast-out")]
    pub out: PathBuf,
    /// Suppress progress messages.
    #[arg(long, global = true)]
    pub quiet: bool,
    /// Override one configuration key; may be repeated.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    /// Allow writing into a non-empty output directory.
    #[arg(long, global = true)]
    pub force: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic dataset.
    Synth {
        /// Number of days; overrides `synth.days`.
        #[arg(long)]
        days: Option<u32>,
    },
    /// Read a CSV file, validate it and write it back normalized.
    Ingest {
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,
        /// Column-role schema file.
        #[arg(long, value_name = "PATH")]
        schema: Option<PathBuf>,
    },
    /// Partition the data into training, validation and test sets.
    Split,
    /// Fit a model on the training set.
    Train {
        /// Grid-search hyperparameters against the validation set.
        #[arg(long)]
        grid: bool,
    },
    /// Score a trained model on every partition.
    Evaluate {
        #[arg(long, value_name = "PATH")]
        model: PathBuf,
        /// Bin width of the residual histograms, in degrees.
        #[arg(long, default_value_t = 0.5)]
        bin_width: f64,
    },
    /// Compare feature groups and sweep the MVA window and forecast horizon.
    Ablate {
        /// Feature sets separated by `;`, each a comma list of groups or columns.
        #[arg(long)]
        groups: Option<String>,
        /// Grid-search each configuration instead of using fixed hyperparameters.
        #[arg(long)]
        grid: bool,
        /// Only produce the feature-group table.
        #[arg(long)]
        skip_sweeps: bool,
    },
    /// Explain a trained model.
    Explain(ExplainArgs),
    /// Time-series diagnostics of the room temperature.
    Diagnose(DiagnoseArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Importance,
    Pdp,
    Surrogate,
    Lime,
    Shap,
    Pffra,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CaseKind {
    Accurate,
    Deviated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SplitArg {
    Train,
    Validation,
    Test,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PffraMode {
    Static,
    Rolling,
}

#[derive(Debug, Args)]
pub struct ExplainArgs {
    pub method: Method,
    #[arg(long, value_name = "PATH")]
    pub model: PathBuf,
    /// Feature of interest (pdp, pffra). PDP defaults to every feature,
    /// PF-FRA to MVART.
    #[arg(long)]
    pub feature: Option<String>,
    /// Partition to explain. PF-FRA defaults to all three, the rest to validation.
    #[arg(long, value_enum)]
    pub split: Option<SplitArg>,
    /// Pick instances by forecast error (lime, shap).
    #[arg(long, value_enum, value_delimiter = ',')]
    pub select: Vec<CaseKind>,
    /// Absolute error below which a prediction counts as accurate.
    #[arg(long, default_value_t = 0.01)]
    pub threshold_acc: f64,
    /// Absolute error above which a prediction counts as deviated.
    #[arg(long, default_value_t = 2.0)]
    pub threshold_dev: f64,
    /// Forecast row to explain when `--select` is not given (lime, shap).
    #[arg(long, default_value_t = 0)]
    pub index: usize,
    /// Tree surrogate depth.
    #[arg(long, default_value_t = 3)]
    pub depth: usize,
    /// Ridge surrogate penalty.
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// PDP grid points for continuous features.
    #[arg(long, default_value_t = 20)]
    pub grid_size: usize,
    /// LIME perturbation samples.
    #[arg(long, default_value_t = 5000)]
    pub samples: usize,
    /// PF-FRA on the design matrix or on the rolling forecast.
    #[arg(long, value_enum, default_value = "static")]
    pub mode: PffraMode,
    /// Apply a Hann window before the transform.
    #[arg(long)]
    pub hann: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Diagnostic {
    Acf,
    Pacf,
    Adf,
    Hist,
}

#[derive(Debug, Args)]
pub struct DiagnoseArgs {
    pub which: Diagnostic,
    #[arg(long, default_value_t = 30)]
    pub max_lag: usize,
    /// Histogram bin width, in degrees.
    #[arg(long, default_value_t = 1.0)]
    pub bin_width: f64,
}

/// Settings after applying the config file, `--set` overrides and `--seed`.
fn settings_for(cli: &Cli) -> Result<BTreeMap<String, String>> {
    let mut settings = default_settings();
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        apply_text(&mut settings, &text, &path.display().to_string())?;
    }
    for item in &cli.overrides {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("--set expects KEY=VALUE, got `{item}`")))?;
        config::set(&mut settings, k.trim(), v.trim())?;
    }
    if let Some(seed) = cli.seed {
        settings.insert("seed".into(), seed.to_string());
    }
    Ok(settings)
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match settings_for(&cli).and_then(|s| commands::execute(&cli, s)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("roomcast: {e}");
            e.kind().exit_code()
        }
    }
}
