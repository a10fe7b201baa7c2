//! Brute-force references for tiny graphs: exhaustive minimum Normalized Cut
//! and dense generalized eigendecomposition. These share no code with the
//! sparse solver path and exist to check it.

use crate::graph::SparseGraph;
use crate::{Error, Result};

/// Largest graph [`min_ncut_exhaustive`] will enumerate.
pub const EXHAUSTIVE_LIMIT: usize = 22;
/// Largest graph [`dense_generalized_eig`] will materialize.
pub const DENSE_LIMIT: usize = 256;

/// Dense `(n+k) × (n+k)` adjacency, row-major.
pub fn dense_adjacency(g: &SparseGraph) -> Vec<f64> {
    let n = g.n_nodes();
    let mut w = vec![0.0; n * n];
    for i in 0..n {
        for (j, wt) in g.row(i) {
            w[i * n + j] += wt;
        }
    }
    w
}

/// Dense `L = D − W` with `D` taken from adjacency row sums.
pub fn dense_laplacian(g: &SparseGraph) -> Vec<f64> {
    let n = g.n_nodes();
    let mut l = dense_adjacency(g);
    for i in 0..n {
        let d: f64 = l[i * n..(i + 1) * n].iter().sum();
        for v in &mut l[i * n..(i + 1) * n] {
            *v = -*v;
        }
        l[i * n + i] += d;
    }
    l
}

/// Minimum Normalized Cut over all `2^(N−1) − 1` nontrivial bipartitions.
///
/// Node 0 is pinned to side A (`false`). Among equal values the
/// lexicographically smallest assignment wins.
pub fn min_ncut_exhaustive(g: &SparseGraph) -> Result<(Vec<bool>, f64)> {
    let n = g.n_nodes();
    if n > EXHAUSTIVE_LIMIT {
        return Err(Error::TooLarge { size: n, limit: EXHAUSTIVE_LIMIT });
    }
    if n < 2 {
        return Err(Error::invalid("need at least two nodes to bipartition"));
    }
    let mut edges = Vec::new();
    g.for_each_edge(|i, j, w| edges.push((i, j, w)));
    let deg: Vec<f64> = (0..n).map(|i| g.row(i).map(|(_, w)| w).sum()).collect();
    let vol: f64 = deg.iter().sum();

    let side = |mask: u32, i: usize| i > 0 && (mask >> (i - 1)) & 1 == 1;
    let to_vec = |mask: u32| (0..n).map(|i| side(mask, i)).collect::<Vec<bool>>();
    let mut best: Option<(f64, u32)> = None;
    for mask in 1u32..(1u32 << (n - 1)) {
        let mut cut = 0.0;
        for &(i, j, w) in &edges {
            if side(mask, i) != side(mask, j) {
                cut += w;
            }
        }
        let vol_b: f64 = (1..n).filter(|&i| side(mask, i)).map(|i| deg[i]).sum();
        let vol_a = vol - vol_b;
        let ncut = cut / vol_a + cut / vol_b;
        let better = match best {
            None => true,
            Some((b, bm)) => ncut < b || (ncut == b && to_vec(mask) < to_vec(bm)),
        };
        if better {
            best = Some((ncut, mask));
        }
    }
    let (value, mask) = best.expect("at least one bipartition");
    Ok((to_vec(mask), value))
}

/// Eigendecomposition of a dense symmetric matrix by cyclic Jacobi rotations.
/// Returns eigenvalues ascending and the matching unit eigenvectors.
pub fn jacobi_eigen(matrix: &[f64], n: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    assert_eq!(matrix.len(), n * n);
    let mut a = matrix.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let scale: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[x * n + x].total_cmp(&a[y * n + y]));
    let values = order.iter().map(|&i| a[i * n + i]).collect();
    let vectors = order.iter().map(|&j| (0..n).map(|k| v[k * n + j]).collect()).collect();
    (values, vectors)
}

/// Full spectrum of `L x = λ D x`.
#[derive(Debug, Clone)]
pub struct DenseEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// D-orthonormal eigenvectors, one per value.
    pub vectors: Vec<Vec<f64>>,
}

/// Solves the generalized problem densely through `D^{-1/2} L D^{-1/2}`.
pub fn dense_generalized_eig(g: &SparseGraph) -> Result<DenseEigen> {
    let n = g.n_nodes();
    if n > DENSE_LIMIT {
        return Err(Error::TooLarge { size: n, limit: DENSE_LIMIT });
    }
    let l = dense_laplacian(g);
    let d: Vec<f64> = (0..n).map(|i| l[i * n + i]).collect();
    if d.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::invalid("every node needs positive degree"));
    }
    let inv_sqrt: Vec<f64> = d.iter().map(|x| 1.0 / x.sqrt()).collect();
    let m: Vec<f64> = (0..n * n).map(|idx| l[idx] * inv_sqrt[idx / n] * inv_sqrt[idx % n]).collect();
    let (values, us) = jacobi_eigen(&m, n);
    let vectors = us.into_iter().map(|u| u.iter().zip(&inv_sqrt).map(|(a, b)| a * b).collect()).collect();
    Ok(DenseEigen { values, vectors })
}
