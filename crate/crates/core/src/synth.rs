//! Synthetic benchmark images: binary square patterns with Gaussian or
//! salt-and-pepper noise, min-max rescaled to 8-bit intensities.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::features::FeatureMap;
use crate::segmenter::Segmentation;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pattern {
    /// One square of side `⌊ℓ/2⌋` in the middle.
    CenteredSquare,
    /// Four squares of side `⌊ℓ/4⌋`, one centered in each quadrant.
    FourSquares,
    /// Two squares of side `⌊ℓ/3⌋` on the main diagonal, touching at a corner.
    DiagonalSquares,
}

impl Pattern {
    pub const ALL: [Pattern; 3] = [Pattern::CenteredSquare, Pattern::FourSquares, Pattern::DiagonalSquares];

    pub fn name(self) -> &'static str {
        match self {
            Pattern::CenteredSquare => "centered-square",
            Pattern::FourSquares => "four-squares",
            Pattern::DiagonalSquares => "diagonal-squares",
        }
    }
}

impl std::str::FromStr for Pattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Pattern::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown pattern {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Noise {
    None,
    /// Additive zero-mean Gaussian noise with the given variance.
    Gaussian { variance: f64 },
    /// Each pixel is replaced with probability `density` by 0 or 1.
    SaltPepper { density: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub pattern: Pattern,
    pub side: usize,
    pub noise: Noise,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if self.side < 4 {
            return Err(Error::invalid(format!("side must be at least 4, got {}", self.side)));
        }
        match self.noise {
            Noise::Gaussian { variance } if !(variance >= 0.0 && variance.is_finite()) => {
                Err(Error::invalid(format!("Gaussian variance must be non-negative, got {variance}")))
            }
            Noise::SaltPepper { density } if !(0.0..=1.0).contains(&density) => {
                Err(Error::invalid(format!("salt-and-pepper density must lie in [0, 1], got {density}")))
            }
            _ => Ok(()),
        }
    }
}

/// `side × side` grid of region ids in {0, 1}; 1 is foreground.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundTruth {
    pub side: usize,
    pub labels: Vec<u8>,
}

impl GroundTruth {
    pub fn to_segmentation(&self) -> Segmentation {
        Segmentation {
            height: self.side,
            width: self.side,
            seg_ids: self.labels.iter().map(|&l| l as u32).collect(),
            n_segments: 2,
            per_segment_energy: vec![None; 2],
        }
    }
}

fn fill(labels: &mut [u8], side: usize, top: usize, left: usize, size: usize) {
    for r in top..top + size {
        labels[r * side + left..r * side + left + size].fill(1);
    }
}

/// Noise-free binary pattern.
pub fn pattern_mask(pattern: Pattern, side: usize) -> GroundTruth {
    let mut labels = vec![0u8; side * side];
    match pattern {
        Pattern::CenteredSquare => {
            let s = side / 2;
            let o = (side - s) / 2;
            fill(&mut labels, side, o, o, s);
        }
        Pattern::FourSquares => {
            let s = side / 4;
            let half = side / 2;
            for (qr, qc) in [(0, 0), (0, half), (half, 0), (half, half)] {
                let qh = if qr == 0 { half } else { side - half };
                let qw = if qc == 0 { half } else { side - half };
                fill(&mut labels, side, qr + (qh - s) / 2, qc + (qw - s) / 2, s);
                debug_assert!(qw >= s);
            }
        }
        Pattern::DiagonalSquares => {
            let s = side / 3;
            let o = (side - 2 * s) / 2;
            fill(&mut labels, side, o, o, s);
            fill(&mut labels, side, o + s, o + s, s);
        }
    }
    GroundTruth { side, labels }
}

/// Draws the pattern, adds noise, min-max rescales to integers in [0, 255]
/// and replicates the intensity to three channels.
pub fn generate(spec: &SyntheticSpec) -> Result<(FeatureMap, GroundTruth)> {
    spec.validate()?;
    let gt = pattern_mask(spec.pattern, spec.side);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut values: Vec<f64> = gt.labels.iter().map(|&l| l as f64).collect();
    match spec.noise {
        Noise::None => {}
        Noise::Gaussian { variance } => {
            let normal = Normal::new(0.0, variance.sqrt()).expect("validated variance");
            values.iter_mut().for_each(|v| *v += normal.sample(&mut rng));
        }
        Noise::SaltPepper { density } => {
            for v in values.iter_mut() {
                if rng.random::<f64>() < density {
                    *v = if rng.random::<bool>() { 1.0 } else { 0.0 };
                }
            }
        }
    }
    let intensities = rescale_to_u8(&values);
    let data = intensities.iter().flat_map(|&v| [v as f64; 3]).collect();
    let fm = FeatureMap::new(spec.side, spec.side, 3, data)?;
    Ok((fm, gt))
}

/// Affine min-max map onto [0, 255] followed by rounding. A constant input
/// maps to all zeros.
pub fn rescale_to_u8(values: &[f64]) -> Vec<u8> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(hi > lo) {
        return vec![0; values.len()];
    }
    let scale = 255.0 / (hi - lo);
    values.iter().map(|&v| ((v - lo) * scale).round().clamp(0.0, 255.0) as u8).collect()
}

/// First channel of a synthetic feature map as 8-bit intensities.
pub fn intensities(fm: &FeatureMap) -> Vec<u8> {
    (0..fm.len()).map(|p| fm.pixel(p)[0].round().clamp(0.0, 255.0) as u8).collect()
}
