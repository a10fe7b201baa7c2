//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use xncut::segmenter::{SegmenterConfig, StopRule};
use xncut::synth::{Noise, Pattern};

#[derive(Debug, Parser)]
#[command(name = "xncut", version, about = "Normalized Cuts segmentation on a grid graph with color nodes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Segment an image (PNG/PGM) or a feature file (FMAP).
    Segment(SegmentArgs),
    /// Generate a synthetic benchmark image with its ground truth.
    Synth(SynthArgs),
    /// Score a predicted label map against ground-truth label maps.
    Eval(EvalArgs),
    /// Time and score the pipeline over a range of synthetic image sizes.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StopRuleArg {
    ShiMalik,
    Literal,
}

impl From<StopRuleArg> for StopRule {
    fn from(s: StopRuleArg) -> Self {
        match s {
            StopRuleArg::ShiMalik => StopRule::ShiMalik,
            StopRuleArg::Literal => StopRule::Literal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PatternArg {
    CenteredSquare,
    FourSquares,
    DiagonalSquares,
}

impl From<PatternArg> for Pattern {
    fn from(p: PatternArg) -> Self {
        match p {
            PatternArg::CenteredSquare => Pattern::CenteredSquare,
            PatternArg::FourSquares => Pattern::FourSquares,
            PatternArg::DiagonalSquares => Pattern::DiagonalSquares,
        }
    }
}

/// Parameters of the segmentation pipeline shared by `segment` and `bench`.
#[derive(Debug, Clone, Args)]
pub struct PipelineArgs {
    /// Grid edge weight.
    #[arg(long, default_value_t = 0.01)]
    pub mu: f64,
    /// Color vocabulary size for K-means quantization.
    #[arg(long, default_value_t = 256)]
    pub k: usize,
    /// Eigensolver residual tolerance.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Eigensolver iteration budget.
    #[arg(long, default_value_t = 2000)]
    pub max_iters: usize,
    /// Thresholds per family in the cut sweep.
    #[arg(long, default_value_t = 32)]
    pub candidates: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct SegmentArgs {
    /// PNG or PGM image, or FMAP feature file.
    pub input: PathBuf,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
    /// Project features onto this many principal axes first.
    #[arg(long)]
    pub pca: Option<usize>,
    /// Bilinearly upsample features to HxW before quantizing (e.g. 480x320).
    #[arg(long, value_parser = parse_size)]
    pub upsample: Option<(usize, usize)>,
    /// Accept a split when its energy is below this (see --stop-rule).
    #[arg(long, default_value_t = 0.01)]
    pub energy_threshold: f64,
    /// Maximum number of nested subdivisions.
    #[arg(long, default_value_t = 3)]
    pub max_depth: usize,
    #[arg(long, value_enum, default_value_t = StopRuleArg::ShiMalik)]
    pub stop_rule: StopRuleArg,
    /// Output directory.
    #[arg(short, long, default_value = ".")]
    pub output: PathBuf,
}

impl SegmentArgs {
    pub fn config(&self) -> SegmenterConfig {
        SegmenterConfig {
            energy_threshold: self.energy_threshold,
            max_depth: self.max_depth,
            stop_rule: self.stop_rule.into(),
            ..self.pipeline.config()
        }
    }
}

impl PipelineArgs {
    pub fn config(&self) -> SegmenterConfig {
        SegmenterConfig {
            mu: self.mu,
            k: self.k,
            eig_tol: self.tol,
            eig_max_iters: self.max_iters,
            n_candidates: self.candidates,
            seed: self.seed,
            ..SegmenterConfig::default()
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    #[arg(long, value_enum, default_value_t = PatternArg::CenteredSquare)]
    pub pattern: PatternArg,
    /// Image side length.
    #[arg(long, default_value_t = 100)]
    pub side: usize,
    /// Gaussian noise variance.
    #[arg(long, conflicts_with = "sp")]
    pub gaussian: Option<f64>,
    /// Salt & pepper density.
    #[arg(long)]
    pub sp: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory.
    #[arg(short, long, default_value = ".")]
    pub output: PathBuf,
}

impl SynthArgs {
    pub fn noise(&self) -> Noise {
        match (self.gaussian, self.sp) {
            (Some(variance), _) => Noise::Gaussian { variance },
            (None, Some(density)) => Noise::SaltPepper { density },
            (None, None) => Noise::None,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    /// Predicted label map (PGM).
    pub pred: PathBuf,
    /// Ground-truth label maps (PGM); the mIoU is averaged over them.
    #[arg(required = true)]
    pub gt: Vec<PathBuf>,
    /// Identifier recorded in the output; defaults to the prediction's file stem.
    #[arg(long)]
    pub id: Option<String>,
    /// Write the JSON record here instead of standard output.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// Image side lengths, comma separated; may be empty.
    #[arg(long, value_parser = parse_sides, default_value = "100,200,400,800")]
    pub sides: SideList,
    #[arg(long, value_enum, default_value_t = PatternArg::CenteredSquare)]
    pub pattern: PatternArg,
    /// Gaussian noise variance per unit of side length (variance = scale·side).
    #[arg(long, default_value_t = 0.01)]
    pub noise_scale: f64,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
    /// Write the CSV here instead of standard output.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

// An alias keeps clap from treating the list as a repeated flag.
pub type SideList = Vec<usize>;

fn parse_sides(s: &str) -> Result<SideList, String> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<usize>().map_err(|e| format!("{t:?}: {e}")))
        .collect()
}

fn parse_size(s: &str) -> Result<(usize, usize), String> {
    let (h, w) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected HxW, got {s:?}"))?;
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
    Ok((parse(h)?, parse(w)?))
}
