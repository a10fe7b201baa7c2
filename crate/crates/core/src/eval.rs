//! Segmentation scoring: IoU, one-to-one segment matching and mIoU.
//!
//! Ground-truth and predicted segments are matched by a maximum-total-IoU
//! assignment. When the two segment counts differ the IoU matrix is padded
//! with zero rows or columns to make it square; segments matched to padding
//! are unmatched, and an unmatched ground-truth segment scores 0.

use serde::{Deserialize, Serialize};

use crate::segmenter::Segmentation;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchedPair {
    pub gt: u32,
    pub pred: u32,
    pub iou: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchReport {
    pub pairs: Vec<MatchedPair>,
    pub unmatched_gt: Vec<u32>,
    pub unmatched_pred: Vec<u32>,
    /// Mean over ground-truth segments of the matched IoU.
    pub miou: f64,
}

/// `|A ∩ B| / |A ∪ B|` of two equally sized masks.
pub fn iou(mask_a: &[bool], mask_b: &[bool]) -> Result<f64> {
    if mask_a.len() != mask_b.len() {
        return Err(Error::Dimension { expected: mask_a.len(), got: mask_b.len() });
    }
    let (mut inter, mut union) = (0u64, 0u64);
    for (&a, &b) in mask_a.iter().zip(mask_b) {
        inter += (a && b) as u64;
        union += (a || b) as u64;
    }
    if union == 0 {
        return Err(Error::invalid("IoU of two empty masks is undefined"));
    }
    Ok(inter as f64 / union as f64)
}

/// IoU of every (gt, pred) segment pair, `gt.n_segments × pred.n_segments`,
/// from a single pass over the pixels.
pub fn iou_matrix(gt: &Segmentation, pred: &Segmentation) -> Result<Vec<Vec<f64>>> {
    if (gt.height, gt.width) != (pred.height, pred.width) {
        return Err(Error::invalid(format!(
            "shape mismatch: ground truth is {}x{}, prediction is {}x{}",
            gt.height, gt.width, pred.height, pred.width
        )));
    }
    let (ng, np) = (gt.n_segments, pred.n_segments);
    let mut inter = vec![0u64; ng * np];
    for (&g, &p) in gt.seg_ids.iter().zip(&pred.seg_ids) {
        inter[g as usize * np + p as usize] += 1;
    }
    let gs = gt.sizes();
    let ps = pred.sizes();
    Ok((0..ng)
        .map(|g| {
            (0..np)
                .map(|p| {
                    let i = inter[g * np + p];
                    let u = gs[g] as u64 + ps[p] as u64 - i;
                    if u == 0 { 0.0 } else { i as f64 / u as f64 }
                })
                .collect()
        })
        .collect())
}

/// Minimum-cost perfect matching on a square cost matrix (Hungarian method
/// with potentials, `O(n³)`). Returns the column assigned to each row.
pub fn min_cost_assignment(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    if n == 0 {
        return Vec::new();
    }
    // 1-based arrays with a sentinel column 0.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut row_of = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        row_of[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut col_of = vec![0usize; n];
    for j in 1..=n {
        col_of[row_of[j] - 1] = j - 1;
    }
    col_of
}

/// Matches ground-truth and predicted segments one-to-one, maximizing the
/// total IoU.
pub fn match_segments(gt: &Segmentation, pred: &Segmentation) -> Result<MatchReport> {
    let m = iou_matrix(gt, pred)?;
    let (ng, np) = (gt.n_segments, pred.n_segments);
    let size = ng.max(np);
    let cost: Vec<Vec<f64>> = (0..size)
        .map(|g| (0..size).map(|p| if g < ng && p < np { -m[g][p] } else { 0.0 }).collect())
        .collect();
    let assignment = min_cost_assignment(&cost);

    let mut pairs = Vec::new();
    let mut unmatched_gt = Vec::new();
    let mut pred_used = vec![false; np];
    for (g, &p) in assignment.iter().enumerate().take(ng) {
        if p < np {
            pairs.push(MatchedPair { gt: g as u32, pred: p as u32, iou: m[g][p] });
            pred_used[p] = true;
        } else {
            unmatched_gt.push(g as u32);
        }
    }
    let unmatched_pred = (0..np).filter(|&p| !pred_used[p]).map(|p| p as u32).collect();
    let miou = pairs.iter().map(|p| p.iou).sum::<f64>() / ng as f64;
    Ok(MatchReport { pairs, unmatched_gt, unmatched_pred, miou })
}

/// Mean of the per-ground-truth mIoU over several reference segmentations.
pub fn miou_multi_gt(gts: &[Segmentation], pred: &Segmentation) -> Result<f64> {
    if gts.is_empty() {
        return Err(Error::invalid("at least one ground truth is required"));
    }
    let mut total = 0.0;
    for gt in gts {
        total += match_segments(gt, pred)?.miou;
    }
    Ok(total / gts.len() as f64)
}
