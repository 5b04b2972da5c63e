use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use singlet_core::{PipelineConfig, SplitConfig};

#[derive(Debug, Parser)]
#[command(
    name = "singlet6",
    version,
    about = "Six-photon singlet state simulation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Post-selected six-qubit state, success probability and singlet fidelity.
    Pipeline(PipelineArgs),
    /// 64-bin outcome distribution for one measurement setting, with sampled counts.
    Histogram(HistogramArgs),
    /// Project one qubit and report the remaining five-qubit state.
    Project(ProjectArgs),
    /// Maximal-overlap and reduced witnesses, evaluated analytically and on counts.
    Witness(WitnessArgs),
    /// Collective-rotation invariance over Haar-random unitaries.
    Invariance(InvarianceArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportBasis {
    #[value(name = "HV", alias = "hv")]
    Hv,
    #[value(name = "DA", alias = "da")]
    Da,
}

/// Pipeline configuration: an optional TOML file, overridden by flags.
#[derive(Debug, Clone, Args)]
pub struct ConfigArgs {
    /// TOML file with keys phi, split, noise, shots, seed.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Emission phase in radians.
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<f64>,
    /// `cascade`, `sym`, `a1,a2,a3` or `a1,a2,a3/b1,b2,b3`.
    #[arg(long, value_name = "SPLIT")]
    pub split: Option<SplitConfig>,
    /// White-noise fraction in [0, 1].
    #[arg(long)]
    pub noise: Option<f64>,
    /// Sixfold events per measurement setting.
    #[arg(long)]
    pub shots: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

impl ConfigArgs {
    pub fn resolve(&self) -> Result<PipelineConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading config {}", path.display()))?;
                toml::from_str::<PipelineConfig>(&text)
                    .with_context(|| format!("parsing config {}", path.display()))?
            }
            None => PipelineConfig::default(),
        };
        if let Some(phi) = self.phi {
            cfg.phi = phi;
        }
        if let Some(split) = self.split {
            cfg.split = split;
        }
        if let Some(noise) = self.noise {
            cfg.noise = noise;
        }
        if let Some(shots) = self.shots {
            cfg.shots = shots;
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        cfg.validate()?;
        log::debug!("resolved configuration: {cfg:?}");
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Write data here instead of standard output.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct HistogramArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Six letters from x, y, z, or `angles:<hwp>,<qwp>` in radians.
    #[arg(long, default_value = "zzzzzz")]
    pub setting: String,
}

#[derive(Debug, Args)]
pub struct ProjectArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Output mode to measure (a to f).
    #[arg(long)]
    pub mode: String,
    /// Projection outcome: H, V, D, A, L or R.
    #[arg(long)]
    pub bra: char,
    /// Letters of the five-qubit histogram.
    #[arg(long, value_enum, default_value_t = ReportBasis::Hv)]
    pub basis: ReportBasis,
}

#[derive(Debug, Args)]
pub struct WitnessArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Three histogram CSV files, one per setting x, y, z (any order).
    #[arg(long, num_args = 3, value_name = "FILE")]
    pub counts: Option<Vec<PathBuf>>,
    /// Reference term file (`WORD numerator denominator` per line);
    /// the bundled list is used when omitted.
    #[arg(long, value_name = "FILE")]
    pub golden: Option<PathBuf>,
    #[arg(long, default_value_t = 2000)]
    pub resamples: usize,
    /// Standard errors below zero required for a detection verdict.
    #[arg(long, default_value_t = 1.0)]
    pub significance: f64,
}

#[derive(Debug, Args)]
pub struct InvarianceArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
}
