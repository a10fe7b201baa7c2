//! `xncut bench`: runtime and accuracy over growing synthetic images.

use std::io::Write;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use xncut::eval::match_segments;
use xncut::segmenter::{bisect, quantize_for, StageTimings};
use xncut::synth::{generate, Noise, SyntheticSpec};

use crate::args::BenchArgs;
use crate::output::write_atomic;

/// One CSV row. `wall_time_s` covers quantization and the whole-image
/// bisection; synthesis and scoring are excluded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub side: usize,
    pub n: usize,
    pub wall_time_s: f64,
    pub miou: f64,
}

pub fn measure(args: &BenchArgs) -> anyhow::Result<Vec<BenchRow>> {
    let cfg = args.pipeline.config();
    cfg.validate()?;
    let mut rows = Vec::with_capacity(args.sides.len());
    for &side in &args.sides {
        let spec = SyntheticSpec {
            pattern: args.pattern.into(),
            side,
            noise: Noise::Gaussian { variance: args.noise_scale * side as f64 },
            seed: cfg.seed,
        };
        let (fm, gt) = generate(&spec)?;
        let start = Instant::now();
        let qi = quantize_for(&fm, &cfg, &mut StageTimings::default())?;
        let (seg, _) = bisect(&qi, &cfg)?;
        let wall_time_s = start.elapsed().as_secs_f64();
        let miou = match_segments(&gt.to_segmentation(), &seg)?.miou;
        rows.push(BenchRow { side, n: side * side, wall_time_s, miou });
    }
    Ok(rows)
}

pub fn write_csv(rows: &[BenchRow], out: &mut dyn Write) -> anyhow::Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(["side", "n", "wall_time_s", "miou"])?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn run(args: &BenchArgs) -> anyhow::Result<Vec<BenchRow>> {
    let rows = measure(args)?;
    match &args.output {
        Some(path) => write_atomic(path, |w| write_csv(&rows, w))?,
        None => write_csv(&rows, &mut std::io::stdout().lock())?,
    }
    Ok(rows)
}
