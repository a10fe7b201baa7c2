//! Pixel features and their quantization into a finite color vocabulary.

mod kmeans;
mod pca;
mod resample;

use crate::{Error, Result};

pub use kmeans::{distortion, quantize, quantize_detailed, seeded_init, KMeansParams, Quantization};
pub use pca::{pca_project, PcaProjection};
pub use resample::upsample_bilinear;

/// A `height × width × dim` grid of real features, row-major and
/// channel-last.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMap {
    pub height: usize,
    pub width: usize,
    pub dim: usize,
    pub data: Vec<f64>,
}

impl FeatureMap {
    pub fn new(height: usize, width: usize, dim: usize, data: Vec<f64>) -> Result<Self> {
        if height == 0 || width == 0 || dim == 0 {
            return Err(Error::invalid(format!(
                "feature map must be non-empty, got {height}x{width}x{dim}"
            )));
        }
        let expected = height * width * dim;
        if data.len() != expected {
            return Err(Error::Dimension { expected, got: data.len() });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite feature value at flat index {pos}")));
        }
        Ok(FeatureMap { height, width, dim, data })
    }

    /// Number of pixels.
    pub fn len(&self) -> usize {
        self.height * self.width
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Feature vector of pixel `p` (row-major index).
    pub fn pixel(&self, p: usize) -> &[f64] {
        &self.data[p * self.dim..(p + 1) * self.dim]
    }

    pub fn at(&self, row: usize, col: usize) -> &[f64] {
        self.pixel(row * self.width + col)
    }

    /// Sum over channels of the per-channel population variance.
    pub fn total_variance(&self) -> f64 {
        let n = self.len() as f64;
        let mut mean = vec![0.0; self.dim];
        for p in 0..self.len() {
            for (m, v) in mean.iter_mut().zip(self.pixel(p)) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut total = 0.0;
        for p in 0..self.len() {
            for (m, v) in mean.iter().zip(self.pixel(p)) {
                total += (v - m) * (v - m);
            }
        }
        total / n
    }
}

/// Per-pixel cluster ids over a vocabulary of `k` colors.
///
/// Every id in `0..k` is used by at least one pixel; empty clusters are
/// compacted away on construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantizedImage {
    pub height: usize,
    pub width: usize,
    pub labels: Vec<u32>,
    pub k: usize,
    pub counts: Vec<usize>,
}

impl QuantizedImage {
    /// Builds a quantized image from arbitrary non-negative labels. Unused ids
    /// are removed and the remaining ones renumbered in ascending order.
    pub fn from_labels(height: usize, width: usize, labels: Vec<u32>) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::invalid("quantized image must have at least one pixel"));
        }
        if labels.len() != height * width {
            return Err(Error::Dimension { expected: height * width, got: labels.len() });
        }
        let (labels, counts) = compact_labels(labels);
        Ok(QuantizedImage { height, width, k: counts.len(), labels, counts })
    }

    /// Number of pixels.
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Renumbers labels densely (preserving their order) and counts them.
pub(crate) fn compact_labels(mut labels: Vec<u32>) -> (Vec<u32>, Vec<usize>) {
    let max = labels.iter().copied().max().unwrap_or(0) as usize;
    let mut raw_counts = vec![0usize; max + 1];
    for &l in &labels {
        raw_counts[l as usize] += 1;
    }
    let mut remap = vec![u32::MAX; max + 1];
    let mut counts = Vec::new();
    for (old, &c) in raw_counts.iter().enumerate() {
        if c > 0 {
            remap[old] = counts.len() as u32;
            counts.push(c);
        }
    }
    for l in labels.iter_mut() {
        *l = remap[*l as usize];
    }
    (labels, counts)
}
