//! `xncut synth`: noisy square patterns with their ground truth.

use xncut::io::{write_fmap, write_pgm8};
use xncut::synth::{generate, intensities, GroundTruth, SyntheticSpec};
use xncut::FeatureMap;

use crate::args::SynthArgs;
use crate::output::write_atomic;

pub const IMAGE_FILE: &str = "image.pgm";
pub const FEATURES_FILE: &str = "image.fmap";
pub const GT_FILE: &str = "gt.pgm";

/// Writes the noisy image as PGM and FMAP plus the 0/1 ground truth as PGM.
pub fn run(args: &SynthArgs) -> anyhow::Result<(FeatureMap, GroundTruth)> {
    let spec = SyntheticSpec { pattern: args.pattern.into(), side: args.side, noise: args.noise(), seed: args.seed };
    let (fm, gt) = generate(&spec)?;
    let side = spec.side;
    let out = &args.output;
    write_atomic(&out.join(IMAGE_FILE), |w| Ok(write_pgm8(w, side, side, &intensities(&fm))?))?;
    write_atomic(&out.join(FEATURES_FILE), |w| Ok(write_fmap(&fm, w)?))?;
    write_atomic(&out.join(GT_FILE), |w| Ok(write_pgm8(w, side, side, &gt.labels)?))?;
    Ok((fm, gt))
}
