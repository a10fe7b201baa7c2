//! Image bisection and recursive segmentation.

use std::collections::VecDeque;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::cut::{threshold_sweep, CutResult, DEFAULT_CANDIDATES};
use crate::eigen::{fiedler, EigenParams, EigenResult};
use crate::features::{quantize, FeatureMap, KMeansParams, QuantizedImage};
use crate::graph::build_region_graph;
use crate::{Error, Result};

/// When a candidate split of a region is accepted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum StopRule {
    /// Split only when the cut is cheap: `energy < energy_threshold`.
    #[default]
    ShiMalik,
    /// Keep splitting while `energy >= energy_threshold`.
    Literal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmenterConfig {
    pub mu: f64,
    pub k: usize,
    pub energy_threshold: f64,
    pub max_depth: usize,
    pub eig_tol: f64,
    pub eig_max_iters: usize,
    pub n_candidates: usize,
    pub seed: u64,
    pub stop_rule: StopRule,
}

impl Default for SegmenterConfig {
    fn default() -> Self {
        SegmenterConfig {
            mu: 0.01,
            k: 256,
            energy_threshold: 0.01,
            max_depth: 3,
            eig_tol: 1e-6,
            eig_max_iters: 2000,
            n_candidates: DEFAULT_CANDIDATES,
            seed: 0,
            stop_rule: StopRule::ShiMalik,
        }
    }
}

impl SegmenterConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return Err(Error::invalid(format!("mu must be positive, got {}", self.mu)));
        }
        if self.k == 0 {
            return Err(Error::invalid("k must be at least 1"));
        }
        if !(self.energy_threshold >= 0.0) {
            return Err(Error::invalid("energy threshold must be non-negative"));
        }
        if !(self.eig_tol > 0.0) || self.eig_max_iters == 0 {
            return Err(Error::invalid("eigensolver tolerance and iteration budget must be positive"));
        }
        if self.n_candidates < 2 {
            return Err(Error::invalid("need at least two threshold candidates"));
        }
        Ok(())
    }

    fn eigen_params(&self) -> EigenParams {
        EigenParams { tol: self.eig_tol, max_iters: self.eig_max_iters, seed: self.seed }
    }

    fn accepts(&self, energy: f64, depth: usize) -> bool {
        if depth >= self.max_depth {
            return false;
        }
        match self.stop_rule {
            StopRule::ShiMalik => energy < self.energy_threshold,
            StopRule::Literal => energy >= self.energy_threshold,
        }
    }
}

/// Per-pixel segment ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segmentation {
    pub height: usize,
    pub width: usize,
    pub seg_ids: Vec<u32>,
    pub n_segments: usize,
    /// Energy of the cut that produced each segment; `None` for a segment
    /// that is the whole image.
    pub per_segment_energy: Vec<Option<f64>>,
}

impl Segmentation {
    /// Wraps an arbitrary label map, renumbering ids densely in ascending
    /// order of the original labels.
    pub fn from_labels(height: usize, width: usize, labels: Vec<u32>) -> Result<Self> {
        if labels.len() != height * width || labels.is_empty() {
            return Err(Error::Dimension { expected: height * width, got: labels.len() });
        }
        let (seg_ids, counts) = crate::features::compact_labels(labels);
        Ok(Segmentation {
            height,
            width,
            n_segments: counts.len(),
            per_segment_energy: vec![None; counts.len()],
            seg_ids,
        })
    }

    /// Pixel count of every segment.
    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.n_segments];
        self.seg_ids.iter().for_each(|&s| sizes[s as usize] += 1);
        sizes
    }

    pub fn mask(&self, segment: u32) -> Vec<bool> {
        self.seg_ids.iter().map(|&s| s == segment).collect()
    }
}

/// Wall-clock time spent in each pipeline stage.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct StageTimings {
    pub quantize: Duration,
    pub graph: Duration,
    pub eigen: Duration,
    pub cut: Duration,
}

impl StageTimings {
    pub fn total(&self) -> Duration {
        self.quantize + self.graph + self.eigen + self.cut
    }
}

/// One attempted bisection during recursive segmentation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitRecord {
    pub depth: usize,
    pub n_pixels: usize,
    pub energy: f64,
    pub ncut: f64,
    pub n_mismatch: usize,
    pub n_boundary: usize,
    pub accepted: bool,
    pub eigen_converged: bool,
}

/// Bisection of one region: the cut over its local graph plus the
/// eigenvector it was thresholded from.
#[derive(Debug, Clone)]
pub struct RegionCut {
    pub cut: CutResult,
    pub eigen: EigenResult,
    pub n_grid: usize,
}

impl RegionCut {
    /// Side of every region pixel (`true` = B).
    pub fn pixel_sides(&self) -> &[bool] {
        self.cut.pixel_sides(self.n_grid)
    }
}

fn bisect_region(
    qi: &QuantizedImage,
    pixels: &[usize],
    cfg: &SegmenterConfig,
    timings: &mut StageTimings,
) -> Result<RegionCut> {
    if pixels.len() < 2 {
        return Err(Error::degenerate("a region needs at least two pixels to split"));
    }
    let t = Instant::now();
    let g = build_region_graph(qi, pixels, cfg.mu)?;
    timings.graph += t.elapsed();

    let t = Instant::now();
    let eigen = fiedler(&g, &cfg.eigen_params())?;
    timings.eigen += t.elapsed();

    let t = Instant::now();
    let cut = threshold_sweep(&g, &eigen.vector, cfg.n_candidates);
    timings.cut += t.elapsed();
    Ok(RegionCut { cut: cut?, eigen, n_grid: g.n_grid })
}

/// Result of [`bisect_detailed`].
#[derive(Debug, Clone)]
pub struct Bisection {
    pub segmentation: Segmentation,
    pub region: RegionCut,
    pub timings: StageTimings,
}

/// Splits the whole image in two; pixel sides become segment ids 0 (A) and 1 (B).
pub fn bisect(qi: &QuantizedImage, cfg: &SegmenterConfig) -> Result<(Segmentation, CutResult)> {
    let b = bisect_detailed(qi, cfg)?;
    Ok((b.segmentation, b.region.cut))
}

pub fn bisect_detailed(qi: &QuantizedImage, cfg: &SegmenterConfig) -> Result<Bisection> {
    cfg.validate()?;
    let pixels: Vec<usize> = (0..qi.len()).collect();
    let mut timings = StageTimings::default();
    let region = bisect_region(qi, &pixels, cfg, &mut timings)?;
    let seg_ids = region.pixel_sides().iter().map(|&b| b as u32).collect();
    let energy = region.cut.energy;
    Ok(Bisection {
        segmentation: Segmentation {
            height: qi.height,
            width: qi.width,
            seg_ids,
            n_segments: 2,
            per_segment_energy: vec![Some(energy); 2],
        },
        region,
        timings,
    })
}

/// Result of [`segment_recursive_detailed`].
#[derive(Debug, Clone)]
pub struct RecursiveSegmentation {
    pub segmentation: Segmentation,
    /// Every attempted split, in processing order.
    pub splits: Vec<SplitRecord>,
    /// Bisection of the whole image, or the error that prevented it; `None`
    /// when the root was never split (`max_depth == 0` or a single pixel).
    pub root: Option<std::result::Result<RegionCut, String>>,
    pub timings: StageTimings,
}

pub fn segment_recursive(qi: &QuantizedImage, cfg: &SegmenterConfig) -> Result<Segmentation> {
    segment_recursive_detailed(qi, cfg).map(|r| r.segmentation)
}

/// Recursive bisection over a FIFO worklist of regions.
///
/// A region is split when [`SegmenterConfig`]'s stop rule accepts the energy of
/// its best cut and it has been subdivided fewer than `max_depth` times along
/// its ancestry. Regions that are not split become final segments, numbered in
/// the order they are finalized (parents before children, side A before
/// side B).
pub fn segment_recursive_detailed(qi: &QuantizedImage, cfg: &SegmenterConfig) -> Result<RecursiveSegmentation> {
    cfg.validate()?;
    let mut timings = StageTimings::default();
    let mut seg_ids = vec![u32::MAX; qi.len()];
    let mut per_segment_energy = Vec::new();
    let mut splits = Vec::new();
    let mut root = None;

    let mut queue: VecDeque<(Vec<usize>, usize, Option<f64>)> = VecDeque::new();
    queue.push_back(((0..qi.len()).collect(), 0, None));
    while let Some((pixels, depth, created_by)) = queue.pop_front() {
        let mut outcome = None;
        if depth < cfg.max_depth && pixels.len() >= 2 {
            match bisect_region(qi, &pixels, cfg, &mut timings) {
                Ok(rc) => {
                    let accepted = cfg.accepts(rc.cut.energy, depth);
                    splits.push(SplitRecord {
                        depth,
                        n_pixels: pixels.len(),
                        energy: rc.cut.energy,
                        ncut: rc.cut.ncut,
                        n_mismatch: rc.cut.n_mismatch,
                        n_boundary: rc.cut.n_boundary,
                        accepted,
                        eigen_converged: rc.eigen.converged,
                    });
                    if accepted {
                        let (mut a, mut b) = (Vec::new(), Vec::new());
                        for (&p, &side) in pixels.iter().zip(rc.pixel_sides()) {
                            if side { b.push(p) } else { a.push(p) }
                        }
                        outcome = Some((a, b, rc.cut.energy));
                    }
                    if depth == 0 {
                        root = Some(Ok(rc));
                    }
                }
                Err(e) => {
                    if depth == 0 {
                        root = Some(Err(e.to_string()));
                    }
                    if !matches!(e, Error::DegenerateCut(_)) {
                        return Err(e);
                    }
                }
            }
        }
        match outcome {
            Some((a, b, energy)) => {
                queue.push_back((a, depth + 1, Some(energy)));
                queue.push_back((b, depth + 1, Some(energy)));
            }
            None => {
                let id = per_segment_energy.len() as u32;
                pixels.iter().for_each(|&p| seg_ids[p] = id);
                per_segment_energy.push(created_by);
            }
        }
    }
    Ok(RecursiveSegmentation {
        segmentation: Segmentation {
            height: qi.height,
            width: qi.width,
            seg_ids,
            n_segments: per_segment_energy.len(),
            per_segment_energy,
        },
        splits,
        root,
        timings,
    })
}

/// Quantizes a feature map with the configured `k` and seed.
pub fn quantize_for(fm: &FeatureMap, cfg: &SegmenterConfig, timings: &mut StageTimings) -> Result<QuantizedImage> {
    let t = Instant::now();
    let qi = quantize(fm, &KMeansParams { k: cfg.k, seed: cfg.seed, ..KMeansParams::default() });
    timings.quantize += t.elapsed();
    qi
}
