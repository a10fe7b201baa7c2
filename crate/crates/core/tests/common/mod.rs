#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use xncut::graph::build_graph;
use xncut::{QuantizedImage, SparseGraph};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random labels on an `h × w` grid using up to `k` colors; compaction may
/// reduce the final vocabulary.
pub fn random_image(rng: &mut ChaCha8Rng, h: usize, w: usize, k: usize) -> QuantizedImage {
    let labels = (0..h * w).map(|_| rng.random_range(0..k as u32)).collect();
    QuantizedImage::from_labels(h, w, labels).unwrap()
}

/// A random image whose graph has at most `max_nodes` nodes.
pub fn random_small_image(rng: &mut ChaCha8Rng, max_nodes: usize, max_k: usize) -> QuantizedImage {
    loop {
        let h = rng.random_range(1..=5);
        let w = rng.random_range(1..=5);
        let k = rng.random_range(1..=max_k);
        if h * w + k <= max_nodes {
            return random_image(rng, h, w, k);
        }
    }
}

pub fn random_mu(rng: &mut ChaCha8Rng) -> f64 {
    // Log-uniform over [0.01, 50].
    let t: f64 = rng.random();
    (0.01f64.ln() + t * (50.0f64.ln() - 0.01f64.ln())).exp()
}

pub fn random_graph(rng: &mut ChaCha8Rng, max_nodes: usize, max_k: usize) -> (QuantizedImage, SparseGraph, f64) {
    let qi = random_small_image(rng, max_nodes, max_k);
    let mu = random_mu(rng);
    let g = build_graph(&qi, mu).unwrap();
    (qi, g, mu)
}

/// Random node sides with at least one pixel on each side. Needs two pixels.
pub fn random_bipartition(rng: &mut ChaCha8Rng, n_grid: usize, n_nodes: usize) -> Vec<bool> {
    assert!(n_grid >= 2);
    loop {
        let a: Vec<bool> = (0..n_nodes).map(|_| rng.random()).collect();
        let b = a[..n_grid].iter().filter(|&&s| s).count();
        if b > 0 && b < n_grid {
            return a;
        }
    }
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Grid neighbors of pixel `p`, enumerated independently of the graph module.
pub fn grid_neighbors(h: usize, w: usize, p: usize) -> Vec<usize> {
    let (r, c) = (p / w, p % w);
    let mut out = Vec::new();
    if r > 0 {
        out.push(p - w);
    }
    if r + 1 < h {
        out.push(p + w);
    }
    if c > 0 {
        out.push(p - 1);
    }
    if c + 1 < w {
        out.push(p + 1);
    }
    out
}

/// Dense `L_all` assembled from the block form `[[L_grid + I, −H], [−Hᵀ, D_n]]`.
pub fn block_laplacian(qi: &QuantizedImage, mu: f64) -> Vec<f64> {
    let (n, k) = (qi.len(), qi.k);
    let m = n + k;
    let mut l = vec![0.0; m * m];
    for p in 0..n {
        let nbrs = grid_neighbors(qi.height, qi.width, p);
        l[p * m + p] = mu * nbrs.len() as f64 + 1.0;
        for q in nbrs {
            l[p * m + q] = -mu;
        }
        let c = n + qi.labels[p] as usize;
        l[p * m + c] = -1.0;
        l[c * m + p] = -1.0;
    }
    for j in 0..k {
        l[(n + j) * m + n + j] = qi.counts[j] as f64;
    }
    l
}

pub fn quadratic(m: &[f64], z: &[f64]) -> f64 {
    let n = z.len();
    (0..n).map(|i| z[i] * (0..n).map(|j| m[i * n + j] * z[j]).sum::<f64>()).sum()
}
