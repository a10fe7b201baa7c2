use std::collections::{HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{compact_labels, FeatureMap, QuantizedImage};
use crate::{Error, Result};

/// Mini-batch K-means settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KMeansParams {
    pub k: usize,
    pub seed: u64,
    pub batch: usize,
    pub iters: usize,
}

impl Default for KMeansParams {
    fn default() -> Self {
        KMeansParams { k: 256, seed: 0, batch: 1024, iters: 100 }
    }
}

/// A quantized image together with the centroid of every surviving cluster.
#[derive(Debug, Clone)]
pub struct Quantization {
    pub image: QuantizedImage,
    /// `image.k × dim` centroids, row-major.
    pub centroids: Vec<f64>,
    pub dim: usize,
    /// Mean squared distance from each pixel to its centroid.
    pub distortion: f64,
}

#[inline]
fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(point: &[f64], centroids: &[f64], dim: usize) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (j, c) in centroids.chunks_exact(dim).enumerate() {
        let d = sq_dist(point, c);
        if d < best.1 {
            best = (j, d);
        }
    }
    best
}

/// Mean squared distance of every point to its nearest centroid.
pub fn distortion(points: &[f64], dim: usize, centroids: &[f64]) -> f64 {
    let n = points.len() / dim;
    let total: f64 = points.chunks_exact(dim).map(|p| nearest(p, centroids, dim).1).sum();
    total / n as f64
}

fn canonical_bits(v: f64) -> u64 {
    // -0.0 and 0.0 are the same color.
    if v == 0.0 {
        0
    } else {
        v.to_bits()
    }
}

/// Distinct feature vectors in lexicographic order, or `None` if there are
/// more than `limit` of them.
fn distinct_vectors(fm: &FeatureMap, limit: usize) -> Option<Vec<Vec<f64>>> {
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    let mut out = Vec::new();
    for p in 0..fm.len() {
        let px = fm.pixel(p);
        let key: Vec<u64> = px.iter().map(|&v| canonical_bits(v)).collect();
        if seen.insert(key) {
            if out.len() == limit {
                return None;
            }
            out.push(px.to_vec());
        }
    }
    out.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Some(out)
}

/// k-means++ seeding: the first center uniformly, each further one with
/// probability proportional to its squared distance to the chosen set.
fn kmeans_pp<R: Rng>(points: &[f64], dim: usize, k: usize, rng: &mut R) -> Vec<f64> {
    let n = points.len() / dim;
    let first = rng.random_range(0..n);
    let mut centroids = points[first * dim..(first + 1) * dim].to_vec();
    let mut dist: Vec<f64> =
        points.chunks_exact(dim).map(|p| sq_dist(p, &centroids[..dim])).collect();
    while centroids.len() / dim < k {
        let total: f64 = dist.iter().sum();
        if total <= 0.0 {
            break;
        }
        let mut target = rng.random::<f64>() * total;
        let mut chosen = n - 1;
        for (i, &d) in dist.iter().enumerate() {
            if target < d {
                chosen = i;
                break;
            }
            target -= d;
        }
        // Rounding at the end of the scan can land on a zero-weight point.
        if dist[chosen] == 0.0 {
            chosen = dist.iter().rposition(|&d| d > 0.0).expect("positive total");
        }
        let c = points[chosen * dim..(chosen + 1) * dim].to_vec();
        for (d, p) in dist.iter_mut().zip(points.chunks_exact(dim)) {
            *d = d.min(sq_dist(p, &c));
        }
        centroids.extend_from_slice(&c);
    }
    centroids
}

/// The k-means++ centers that [`quantize`] starts from for this seed.
pub fn seeded_init(fm: &FeatureMap, k: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    kmeans_pp(&fm.data, fm.dim, k, &mut rng)
}

/// Quantizes the pixels of `fm` into at most `params.k` clusters.
pub fn quantize(fm: &FeatureMap, params: &KMeansParams) -> Result<QuantizedImage> {
    quantize_detailed(fm, params).map(|q| q.image)
}

/// Mini-batch K-means with k-means++ initialization.
///
/// When the map has at most `k` distinct feature vectors the clustering is
/// exact: each distinct vector becomes its own cluster, ordered
/// lexicographically, with zero distortion.
pub fn quantize_detailed(fm: &FeatureMap, params: &KMeansParams) -> Result<Quantization> {
    if params.k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    if params.batch == 0 {
        return Err(Error::invalid("mini-batch size must be at least 1"));
    }
    let dim = fm.dim;
    let n = fm.len();

    if let Some(palette) = distinct_vectors(fm, params.k) {
        let index: HashMap<Vec<u64>, u32> = palette
            .iter()
            .enumerate()
            .map(|(i, v)| (v.iter().map(|&x| canonical_bits(x)).collect(), i as u32))
            .collect();
        let labels: Vec<u32> = (0..n)
            .map(|p| {
                let key: Vec<u64> = fm.pixel(p).iter().map(|&x| canonical_bits(x)).collect();
                index[&key]
            })
            .collect();
        let (labels, counts) = compact_labels(labels);
        return Ok(Quantization {
            image: QuantizedImage { height: fm.height, width: fm.width, k: counts.len(), labels, counts },
            centroids: palette.concat(),
            dim,
            distortion: 0.0,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut centroids = kmeans_pp(&fm.data, dim, params.k, &mut rng);
    let k = centroids.len() / dim;
    let mut seen = vec![0u64; k];
    let mut batch_idx = vec![0usize; params.batch];
    let mut batch_lbl = vec![0usize; params.batch];
    for _ in 0..params.iters {
        for (slot, lbl) in batch_idx.iter_mut().zip(batch_lbl.iter_mut()) {
            *slot = rng.random_range(0..n);
            *lbl = nearest(fm.pixel(*slot), &centroids, dim).0;
        }
        for (&p, &j) in batch_idx.iter().zip(&batch_lbl) {
            seen[j] += 1;
            let eta = 1.0 / seen[j] as f64;
            let c = &mut centroids[j * dim..(j + 1) * dim];
            for (cv, &xv) in c.iter_mut().zip(fm.pixel(p)) {
                *cv += eta * (xv - *cv);
            }
        }
    }

    let mut labels = Vec::with_capacity(n);
    let mut total = 0.0;
    for p in 0..n {
        let (j, d) = nearest(fm.pixel(p), &centroids, dim);
        labels.push(j as u32);
        total += d;
    }
    let mut used = vec![false; k];
    labels.iter().for_each(|&l| used[l as usize] = true);
    let centroids: Vec<f64> = centroids
        .chunks_exact(dim)
        .zip(&used)
        .filter(|(_, &u)| u)
        .flat_map(|(c, _)| c.iter().copied())
        .collect();
    let (labels, counts) = compact_labels(labels);
    Ok(Quantization {
        image: QuantizedImage { height: fm.height, width: fm.width, k: counts.len(), labels, counts },
        centroids,
        dim,
        distortion: total / n as f64,
    })
}
