//! Shared fixtures for the criterion benchmarks.

use xncut::segmenter::{quantize_for, StageTimings};
use xncut::synth::{generate, Noise, Pattern, SyntheticSpec};
use xncut::{QuantizedImage, SegmenterConfig};

/// Centered-square image of side `side` with Gaussian noise of variance
/// `side / 100`, the scaling setup used throughout the benchmarks.
pub fn noisy_square(side: usize, seed: u64) -> xncut::FeatureMap {
    let spec = SyntheticSpec {
        pattern: Pattern::CenteredSquare,
        side,
        noise: Noise::Gaussian { variance: side as f64 / 100.0 },
        seed,
    };
    generate(&spec).expect("valid synthetic spec").0
}

/// The same image quantized with `cfg`.
pub fn quantized_square(side: usize, cfg: &SegmenterConfig) -> QuantizedImage {
    quantize_for(&noisy_square(side, cfg.seed), cfg, &mut StageTimings::default()).expect("quantization")
}
