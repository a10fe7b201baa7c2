//! Discrete bipartitions of the pixel graph and their energies.
//!
//! For sides `A` and `B` the Normalized Cut is `cut/vol(A) + cut/vol(B)`. On
//! the grid-plus-color-nodes graph every cut edge is either a unit color edge
//! (a pixel on the other side from its color node) or a grid edge of weight
//! `mu`, so the same value factors as
//! `vol(V) / (vol(A) vol(B)) · (n_mismatch + mu · n_boundary)`.

use crate::graph::SparseGraph;
use crate::{Error, Result};

/// Default size of each candidate family in [`candidate_thresholds`].
pub const DEFAULT_CANDIDATES: usize = 32;

#[derive(Debug, Clone, PartialEq)]
pub struct CutResult {
    /// Side of every node; `true` is side B.
    pub assignment: Vec<bool>,
    pub threshold: f64,
    pub alpha: f64,
    pub beta: f64,
    /// `cut/vol(A) + cut/vol(B)` from edge enumeration.
    pub ncut: f64,
    /// Factored energy `vol(V)/(vol(A) vol(B)) · (n_mismatch + mu n_boundary)`.
    pub energy: f64,
    pub cut: f64,
    pub n_mismatch: usize,
    /// Grid edges whose endpoints lie on different sides.
    pub n_boundary: usize,
    pub vol_a: f64,
    pub vol_b: f64,
    pub total_volume: f64,
}

impl CutResult {
    /// The two-level vector `z` with `-beta` on side A and `alpha` on side B.
    ///
    /// This pairing is the one that meets `1ᵀDz = 0` and `zᵀDz = 1`;
    /// attaching `-alpha` to A instead only works when the volumes are equal.
    /// Either way `zᵀLz` equals the Normalized Cut, since `(alpha + beta)²`
    /// is symmetric in the two volumes.
    pub fn indicator(&self) -> Vec<f64> {
        self.assignment.iter().map(|&b| if b { self.alpha } else { -self.beta }).collect()
    }

    /// Pixel-node sides only.
    pub fn pixel_sides(&self, n_grid: usize) -> &[bool] {
        &self.assignment[..n_grid]
    }
}

struct CutStats {
    cut: f64,
    vol_b: f64,
    n_mismatch: usize,
    n_boundary: usize,
    pixels_b: usize,
}

fn cut_stats(g: &SparseGraph, side: impl Fn(usize) -> bool) -> CutStats {
    let n = g.n_grid;
    let mut stats = CutStats { cut: 0.0, vol_b: 0.0, n_mismatch: 0, n_boundary: 0, pixels_b: 0 };
    for i in 0..g.n_nodes() {
        let si = side(i);
        if si {
            stats.vol_b += g.degree[i];
            if i < n {
                stats.pixels_b += 1;
            }
        }
        for (j, w) in g.row(i) {
            if i < j && si != side(j) {
                stats.cut += w;
                if j < n {
                    stats.n_boundary += 1;
                }
            }
        }
    }
    for (i, &c) in g.pixel_color.iter().enumerate() {
        if side(i) != side(n + c as usize) {
            stats.n_mismatch += 1;
        }
    }
    stats
}

fn finish(g: &SparseGraph, stats: CutStats, assignment: Vec<bool>, threshold: f64) -> Result<CutResult> {
    let n = g.n_grid;
    if stats.pixels_b == 0 || stats.pixels_b == n {
        return Err(Error::degenerate("one side contains no pixel nodes"));
    }
    let vol = g.total_volume;
    let vol_b = stats.vol_b;
    let vol_a: f64 = g.degree.iter().zip(&assignment).filter(|(_, &b)| !b).map(|(d, _)| d).sum();
    if !(vol_a > 0.0 && vol_b > 0.0) {
        return Err(Error::degenerate("one side has zero volume"));
    }
    let alpha = (vol_a / (vol * vol_b)).sqrt();
    let beta = (vol_b / (vol * vol_a)).sqrt();
    let energy = vol / (vol_a * vol_b) * (stats.n_mismatch as f64 + g.mu * stats.n_boundary as f64);
    Ok(CutResult {
        assignment,
        threshold,
        alpha,
        beta,
        ncut: stats.cut / vol_a + stats.cut / vol_b,
        energy,
        cut: stats.cut,
        n_mismatch: stats.n_mismatch,
        n_boundary: stats.n_boundary,
        vol_a,
        vol_b,
        total_volume: vol,
    })
}

/// Evaluates a bipartition given as one side flag per node (`true` = B).
pub fn discrete_energy(g: &SparseGraph, assignment: &[bool]) -> Result<CutResult> {
    if assignment.len() != g.n_nodes() {
        return Err(Error::Dimension { expected: g.n_nodes(), got: assignment.len() });
    }
    let stats = cut_stats(g, |i| assignment[i]);
    finish(g, stats, assignment.to_vec(), f64::NAN)
}

/// Candidate thresholds for [`threshold_sweep`], ascending and distinct:
/// `n_candidates` count quantiles of `x` together with `n_candidates` evenly
/// spaced values strictly between its minimum and maximum. The maximum itself
/// is never a candidate.
pub fn candidate_thresholds(x: &[f64], n_candidates: usize) -> Vec<f64> {
    let mut sorted = x.to_vec();
    sorted.sort_by(f64::total_cmp);
    let len = sorted.len();
    let (min, max) = (sorted[0], sorted[len - 1]);
    let quantiles = (1..=n_candidates).map(|i| sorted[(i * len / (n_candidates + 1)).min(len - 1)]);
    let spaced = (1..=n_candidates).map(|i| min + (max - min) * i as f64 / (n_candidates + 1) as f64);
    let mut thresholds: Vec<f64> = quantiles.chain(spaced).filter(|&t| t < max).collect();
    thresholds.sort_by(f64::total_cmp);
    thresholds.dedup();
    thresholds
}

/// Thresholds `x` at the [`candidate_thresholds`] and keeps the split with
/// the smallest Normalized Cut. Nodes with `x > t` form side B.
///
/// Splits that leave one side without pixels are skipped. Ties go to the
/// smaller threshold.
pub fn threshold_sweep(g: &SparseGraph, x: &[f64], n_candidates: usize) -> Result<CutResult> {
    if x.len() != g.n_nodes() {
        return Err(Error::Dimension { expected: g.n_nodes(), got: x.len() });
    }
    if n_candidates < 2 {
        return Err(Error::invalid("threshold sweep needs at least two candidates"));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("non-finite entry in the vector to threshold"));
    }
    let thresholds = candidate_thresholds(x, n_candidates);

    let mut best: Option<(f64, f64, CutStats)> = None;
    for &t in &thresholds {
        let stats = cut_stats(g, |i| x[i] > t);
        if stats.pixels_b == 0 || stats.pixels_b == g.n_grid {
            continue;
        }
        let vol_a = g.total_volume - stats.vol_b;
        if !(vol_a > 0.0 && stats.vol_b > 0.0) {
            continue;
        }
        let ncut = stats.cut / vol_a + stats.cut / stats.vol_b;
        // Thresholds ascend, so strict improvement keeps the smaller one on ties.
        if best.as_ref().is_none_or(|(b, _, _)| ncut < *b) {
            best = Some((ncut, t, stats));
        }
    }
    let (_, t, stats) = best.ok_or_else(|| Error::degenerate("every candidate threshold leaves a side without pixels"))?;
    let assignment = x.iter().map(|&v| v > t).collect();
    finish(g, stats, assignment, t)
}
