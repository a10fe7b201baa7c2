//! `xncut eval`: one-to-one matching of a prediction against ground truths.

use std::path::Path;

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};
use xncut::eval::{match_segments, MatchedPair};
use xncut::io::read_pgm_labels;
use xncut::Segmentation;

use crate::args::EvalArgs;
use crate::output::write_atomic;

/// Output of `eval`; `miou` is the mean over ground truths of each one's
/// matched-pair mIoU.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub image_id: String,
    pub miou: f64,
    pub n_pred_segments: usize,
    pub n_gt_segments: Vec<usize>,
    /// Matched pairs per ground truth, ids after dense renumbering.
    pub pairs: Vec<Vec<MatchedPair>>,
}

pub fn load_labels(path: &Path) -> anyhow::Result<Segmentation> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let map = read_pgm_labels(&bytes).with_context(|| format!("decoding {}", path.display()))?;
    Ok(Segmentation::from_labels(map.height, map.width, map.labels)?)
}

pub fn evaluate(image_id: String, pred: &Segmentation, gts: &[Segmentation]) -> anyhow::Result<EvalRecord> {
    if gts.is_empty() {
        bail!("at least one ground truth is required");
    }
    let mut record =
        EvalRecord { image_id, miou: 0.0, n_pred_segments: pred.n_segments, n_gt_segments: vec![], pairs: vec![] };
    for (i, gt) in gts.iter().enumerate() {
        if (gt.height, gt.width) != (pred.height, pred.width) {
            bail!(
                "ground truth {i} is {}x{} but the prediction is {}x{}",
                gt.height,
                gt.width,
                pred.height,
                pred.width
            );
        }
        let report = match_segments(gt, pred)?;
        record.miou += report.miou;
        record.n_gt_segments.push(gt.n_segments);
        record.pairs.push(report.pairs);
    }
    record.miou /= gts.len() as f64;
    Ok(record)
}

pub fn run(args: &EvalArgs) -> anyhow::Result<EvalRecord> {
    let pred = load_labels(&args.pred)?;
    let gts = args.gt.iter().map(|p| load_labels(p)).collect::<anyhow::Result<Vec<_>>>()?;
    let id = args.id.clone().unwrap_or_else(|| {
        args.pred.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
    });
    let record = evaluate(id, &pred, &gts)?;
    let json = serde_json::to_string(&record)?;
    match &args.output {
        Some(path) => write_atomic(path, |w| Ok(writeln!(w, "{json}")?))?,
        None => println!("{json}"),
    }
    Ok(record)
}
