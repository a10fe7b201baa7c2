//! `xncut segment`: features → quantization → recursive Normalized Cuts.

use std::path::Path;

use anyhow::{bail, Context};
use xncut::features::{pca_project, upsample_bilinear, FeatureMap};
use xncut::io::{read_fmap, rgb_to_featuremap, write_pgm16, write_pgm8};
use xncut::segmenter::{quantize_for, segment_recursive_detailed, Segmentation, StageTimings};
use xncut::synth::rescale_to_u8;

use crate::args::SegmentArgs;
use crate::output::{write_atomic, Report, ReportConfig, SplitReport, TimingsMs};

pub const LABELS_FILE: &str = "labels.pgm";
pub const FIEDLER_FILE: &str = "fiedler.pgm";
pub const REPORT_FILE: &str = "report.json";

pub struct SegmentOutcome {
    pub segmentation: Segmentation,
    pub report: Report,
    /// False when the whole-image bisection was degenerate.
    pub root_ok: bool,
}

/// Loads an FMAP feature file (by extension) or decodes a raster image.
pub fn load_features(path: &Path) -> anyhow::Result<FeatureMap> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let is_fmap = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("fmap"));
    let fm = if is_fmap { read_fmap(bytes.as_slice()) } else { rgb_to_featuremap(&bytes) };
    fm.with_context(|| format!("loading {}", path.display()))
}

/// Optional PCA reduction followed by optional upsampling.
pub fn prepare_features(
    fm: FeatureMap,
    pca: Option<usize>,
    upsample: Option<(usize, usize)>,
) -> anyhow::Result<FeatureMap> {
    let fm = match pca {
        Some(d) => {
            let proj = pca_project(&fm, d).context("PCA projection")?;
            if proj.rank_deficient {
                eprintln!("warning: features have fewer than {d} principal axes; missing channels are zero");
            }
            proj.map
        }
        None => fm,
    };
    Ok(match upsample {
        Some((h, w)) => upsample_bilinear(&fm, h, w).context("upsampling features")?,
        None => fm,
    })
}

pub fn run(args: &SegmentArgs) -> anyhow::Result<SegmentOutcome> {
    let cfg = args.config();
    cfg.validate()?;
    let fm = prepare_features(load_features(&args.input)?, args.pca, args.upsample)?;

    let mut quantize = StageTimings::default();
    let qi = quantize_for(&fm, &cfg, &mut quantize)?;
    let result = segment_recursive_detailed(&qi, &cfg)?;
    let seg = &result.segmentation;

    let timings = StageTimings { quantize: quantize.quantize, ..result.timings };
    let report = Report {
        config: ReportConfig {
            input: args.input.clone(),
            segmenter: cfg,
            pca: args.pca,
            upsample: args.upsample,
        },
        n_segments: seg.n_segments,
        splits: result.splits.iter().map(SplitReport::from).collect(),
        timings_ms: TimingsMs::from(&timings),
    };

    if seg.n_segments > usize::from(u16::MAX) + 1 {
        bail!("{} segments do not fit a 16-bit label map", seg.n_segments);
    }
    let labels: Vec<u16> = seg.seg_ids.iter().map(|&s| s as u16).collect();
    write_atomic(&args.output.join(LABELS_FILE), |w| Ok(write_pgm16(w, seg.width, seg.height, &labels)?))?;

    let root_ok = match &result.root {
        Some(Ok(root)) => {
            let fiedler = rescale_to_u8(&root.eigen.vector[..root.n_grid]);
            write_atomic(&args.output.join(FIEDLER_FILE), |w| Ok(write_pgm8(w, seg.width, seg.height, &fiedler)?))?;
            true
        }
        Some(Err(e)) => {
            eprintln!("root bisection failed: {e}");
            false
        }
        None => true,
    };
    write_atomic(&args.output.join(REPORT_FILE), |w| {
        serde_json::to_writer_pretty(&mut *w, &report)?;
        Ok(writeln!(w)?)
    })?;

    Ok(SegmentOutcome { segmentation: result.segmentation, report, root_ok })
}
