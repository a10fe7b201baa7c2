use nalgebra::{DMatrix, SymmetricEigen};

use super::FeatureMap;
use crate::{Error, Result};

/// Output of [`pca_project`].
#[derive(Debug, Clone)]
pub struct PcaProjection {
    pub map: FeatureMap,
    /// Principal axes as rows of length `dim_in`, in descending variance order.
    /// Missing axes (rank deficiency) are all-zero rows.
    pub components: Vec<Vec<f64>>,
    /// Variance carried by each output channel.
    pub explained_variance: Vec<f64>,
    /// Per-channel mean of the input.
    pub mean: Vec<f64>,
    /// Set when the data has fewer than `out_dim` nonzero principal axes; the
    /// missing channels are zero.
    pub rank_deficient: bool,
}

/// Projects every pixel onto the top `out_dim` principal axes of the
/// mean-centered data.
///
/// Each axis is signed so that its largest-magnitude loading is positive.
pub fn pca_project(fm: &FeatureMap, out_dim: usize) -> Result<PcaProjection> {
    if out_dim == 0 || out_dim > fm.dim {
        return Err(Error::invalid(format!(
            "PCA output dimension must be in 1..={}, got {out_dim}",
            fm.dim
        )));
    }
    let d = fm.dim;
    let n = fm.len();
    let mut mean = vec![0.0; d];
    for p in 0..n {
        for (m, v) in mean.iter_mut().zip(fm.pixel(p)) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);

    let mut cov = DMatrix::<f64>::zeros(d, d);
    let mut centered = vec![0.0; d];
    for p in 0..n {
        for ((c, v), m) in centered.iter_mut().zip(fm.pixel(p)).zip(&mean) {
            *c = v - m;
        }
        for a in 0..d {
            for b in a..d {
                cov[(a, b)] += centered[a] * centered[b];
            }
        }
    }
    for a in 0..d {
        for b in a..d {
            let v = cov[(a, b)] / n as f64;
            cov[(a, b)] = v;
            cov[(b, a)] = v;
        }
    }
    let trace = cov.trace();

    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let cutoff = 1e-12 * trace.max(f64::MIN_POSITIVE);
    let mut components = Vec::with_capacity(out_dim);
    let mut explained_variance = Vec::with_capacity(out_dim);
    let mut rank_deficient = false;
    for &idx in order.iter().take(out_dim) {
        let lambda = eig.eigenvalues[idx];
        if lambda <= cutoff {
            rank_deficient = true;
            components.push(vec![0.0; d]);
            explained_variance.push(0.0);
            continue;
        }
        let mut axis: Vec<f64> = eig.eigenvectors.column(idx).iter().copied().collect();
        let mut lead = 0;
        for (i, v) in axis.iter().enumerate() {
            if v.abs() > axis[lead].abs() {
                lead = i;
            }
        }
        if axis[lead] < 0.0 {
            axis.iter_mut().for_each(|v| *v = -*v);
        }
        components.push(axis);
        explained_variance.push(lambda);
    }

    let mut data = Vec::with_capacity(n * out_dim);
    for p in 0..n {
        let px = fm.pixel(p);
        for axis in &components {
            let mut s = 0.0;
            for ((v, m), a) in px.iter().zip(&mean).zip(axis) {
                s += (v - m) * a;
            }
            data.push(s);
        }
    }
    Ok(PcaProjection {
        map: FeatureMap { height: fm.height, width: fm.width, dim: out_dim, data },
        components,
        explained_variance,
        mean,
        rank_deficient,
    })
}
