//! The sparse pixel graph: a 4-connected grid with edge weight `mu`, plus one
//! extra node per color joined to each of its pixels by a unit edge.
//!
//! Node order is pixels first (row-major), then color nodes by ascending
//! cluster id. Adjacency is stored symmetrically in compressed-row form, so
//! each undirected edge appears twice.

use std::io::Write;

use crate::features::QuantizedImage;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SparseGraph {
    /// Number of pixel nodes.
    pub n_grid: usize,
    /// Number of color nodes.
    pub n_extra: usize,
    pub mu: f64,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<u32>,
    pub weights: Vec<f64>,
    pub degree: Vec<f64>,
    pub total_volume: f64,
    /// Color node (local id in `0..n_extra`) of every pixel node.
    pub pixel_color: Vec<u32>,
}

impl SparseGraph {
    /// Total node count `n + k`.
    pub fn n_nodes(&self) -> usize {
        self.n_grid + self.n_extra
    }

    /// Number of undirected edges.
    pub fn n_edges(&self) -> usize {
        self.col_idx.len() / 2
    }

    /// Neighbors of `i` and the weights of the connecting edges.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[range.clone()].iter().map(|&j| j as usize).zip(self.weights[range].iter().copied())
    }

    /// Visits every undirected edge once as `(i, j, w)` with `i < j`.
    pub fn for_each_edge(&self, mut f: impl FnMut(usize, usize, f64)) {
        for i in 0..self.n_nodes() {
            for (j, w) in self.row(i) {
                if i < j {
                    f(i, j, w);
                }
            }
        }
    }

    /// A general weighted graph without the pixel/color structure, for the
    /// spectral routines. All nodes count as grid nodes and `mu` is NaN, so
    /// the cut energies of [`crate::cut`] do not apply to it.
    pub fn from_edges(n_nodes: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut rows: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n_nodes];
        for &(i, j, w) in edges {
            if i >= n_nodes || j >= n_nodes || i == j {
                return Err(Error::invalid(format!("bad edge ({i}, {j})")));
            }
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::invalid(format!("edge weight must be positive, got {w}")));
            }
            rows[i].push((j as u32, w));
            rows[j].push((i as u32, w));
        }
        let mut row_ptr = vec![0];
        let mut col_idx = Vec::new();
        let mut weights = Vec::new();
        let mut degree = Vec::with_capacity(n_nodes);
        for mut row in rows {
            row.sort_by_key(|&(j, _)| j);
            if row.windows(2).any(|p| p[0].0 == p[1].0) {
                return Err(Error::invalid("duplicate edge"));
            }
            degree.push(row.iter().map(|&(_, w)| w).sum());
            for (j, w) in row {
                col_idx.push(j);
                weights.push(w);
            }
            row_ptr.push(col_idx.len());
        }
        Ok(SparseGraph {
            n_grid: n_nodes,
            n_extra: 0,
            mu: f64::NAN,
            row_ptr,
            col_idx,
            weights,
            total_volume: degree.iter().sum(),
            degree,
            pixel_color: Vec::new(),
        })
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n_nodes() {
            return Err(Error::Dimension { expected: self.n_nodes(), got: len });
        }
        Ok(())
    }

    /// Writes the adjacency in Matrix Market coordinate format (1-based,
    /// symmetric, lower triangle). Weights use the shortest decimal form that
    /// round-trips exactly.
    pub fn write_matrix_market<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "%%MatrixMarket matrix coordinate real symmetric")?;
        writeln!(out, "% n_grid={} n_extra={} mu={}", self.n_grid, self.n_extra, self.mu)?;
        writeln!(out, "{} {} {}", self.n_nodes(), self.n_nodes(), self.n_edges())?;
        for i in 0..self.n_nodes() {
            for (j, w) in self.row(i) {
                if j < i {
                    writeln!(out, "{} {} {:?}", i + 1, j + 1, w)?;
                }
            }
        }
        Ok(())
    }
}

/// Builds the grid-plus-color-nodes graph of a whole quantized image.
pub fn build_graph(qi: &QuantizedImage, mu: f64) -> Result<SparseGraph> {
    let pixels: Vec<usize> = (0..qi.len()).collect();
    build_region_graph(qi, &pixels, mu)
}

/// Builds the graph induced by a subset of pixels: only grid edges with both
/// endpoints inside the region are kept, and only the colors present in the
/// region get a node, with degrees from region-local counts.
///
/// `pixels` must be strictly increasing row-major indices; local node `i` is
/// `pixels[i]`.
pub fn build_region_graph(qi: &QuantizedImage, pixels: &[usize], mu: f64) -> Result<SparseGraph> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::invalid(format!("grid weight mu must be positive and finite, got {mu}")));
    }
    if pixels.is_empty() {
        return Err(Error::invalid("region has no pixels"));
    }
    if pixels.windows(2).any(|w| w[0] >= w[1]) || *pixels.last().unwrap() >= qi.len() {
        return Err(Error::invalid("region pixels must be strictly increasing and in range"));
    }
    let (h, w) = (qi.height, qi.width);
    let n = pixels.len();
    let whole = n == qi.len();

    const OUTSIDE: u32 = u32::MAX;
    let local: Vec<u32> = if whole {
        Vec::new()
    } else {
        let mut local = vec![OUTSIDE; qi.len()];
        for (i, &p) in pixels.iter().enumerate() {
            local[p] = i as u32;
        }
        local
    };
    let local_of = |g: usize| -> u32 { if whole { g as u32 } else { local[g] } };

    // Region-local color ids, ascending in global cluster id.
    let mut color_count = vec![0usize; qi.k];
    for &p in pixels {
        color_count[qi.labels[p] as usize] += 1;
    }
    let mut color_map = vec![OUTSIDE; qi.k];
    let mut counts = Vec::new();
    for (c, &cnt) in color_count.iter().enumerate() {
        if cnt > 0 {
            color_map[c] = counts.len() as u32;
            counts.push(cnt);
        }
    }
    let k = counts.len();
    let pixel_color: Vec<u32> = pixels.iter().map(|&p| color_map[qi.labels[p] as usize]).collect();

    let mut row_ptr = Vec::with_capacity(n + k + 1);
    let mut col_idx = Vec::with_capacity(2 * (2 * n + n));
    let mut weights = Vec::with_capacity(col_idx.capacity());
    let mut degree = Vec::with_capacity(n + k);
    row_ptr.push(0);
    for (i, &g) in pixels.iter().enumerate() {
        let (r, c) = (g / w, g % w);
        let mut push = |j: u32, wt: f64| {
            col_idx.push(j);
            weights.push(wt);
        };
        // Neighbors in increasing node order: up, left, right, down, color.
        let candidates = [
            (r > 0).then(|| g - w),
            (c > 0).then(|| g - 1),
            (c + 1 < w).then(|| g + 1),
            (r + 1 < h).then(|| g + w),
        ];
        for nb in candidates.into_iter().flatten() {
            let j = local_of(nb);
            if j != OUTSIDE {
                push(j, mu);
            }
        }
        push((n + pixel_color[i] as usize) as u32, 1.0);
        row_ptr.push(col_idx.len());
        let start = row_ptr[row_ptr.len() - 2];
        degree.push(weights[start..].iter().sum());
    }

    // Color rows: pixels of each color in ascending order.
    let mut offsets = vec![0usize; k + 1];
    for (j, &cnt) in counts.iter().enumerate() {
        offsets[j + 1] = offsets[j] + cnt;
    }
    let base = col_idx.len();
    col_idx.resize(base + n, 0);
    weights.resize(base + n, 1.0);
    let mut cursor = offsets.clone();
    for (i, &pc) in pixel_color.iter().enumerate() {
        let slot = &mut cursor[pc as usize];
        col_idx[base + *slot] = i as u32;
        *slot += 1;
    }
    for j in 0..k {
        row_ptr.push(base + offsets[j + 1]);
        degree.push(weights[base + offsets[j]..base + offsets[j + 1]].iter().sum());
    }

    let total_volume = degree.iter().sum();
    Ok(SparseGraph {
        n_grid: n,
        n_extra: k,
        mu,
        row_ptr,
        col_idx,
        weights,
        degree,
        total_volume,
        pixel_color,
    })
}

/// `zᵀ L z = Σ_{(i,j)∈E} w_ij (z_i − z_j)²`, evaluated edge by edge.
pub fn laplacian_quadratic(g: &SparseGraph, z: &[f64]) -> Result<f64> {
    g.check_len(z.len())?;
    let mut total = 0.0;
    g.for_each_edge(|i, j, w| {
        let d = z[i] - z[j];
        total += w * d * d;
    });
    Ok(total)
}

/// `(D − W) z` in one pass over the rows.
pub fn apply_laplacian(g: &SparseGraph, z: &[f64]) -> Result<Vec<f64>> {
    g.check_len(z.len())?;
    let mut out = vec![0.0; z.len()];
    apply_laplacian_into(g, z, &mut out);
    Ok(out)
}

/// Unchecked variant of [`apply_laplacian`] writing into `out`.
pub(crate) fn apply_laplacian_into(g: &SparseGraph, z: &[f64], out: &mut [f64]) {
    if g.mu.is_finite() {
        return apply_pixel_laplacian(g, z, out);
    }
    for (i, o) in out.iter_mut().enumerate() {
        let start = g.row_ptr[i];
        let end = g.row_ptr[i + 1];
        let mut acc = g.degree[i] * z[i];
        for (&j, &w) in g.col_idx[start..end].iter().zip(&g.weights[start..end]) {
            acc -= w * z[j as usize];
        }
        *o = acc;
    }
}

/// Same product for grid-plus-color graphs, reading weights off the node
/// kinds (`mu` between pixels, 1 otherwise) instead of the weight array.
fn apply_pixel_laplacian(g: &SparseGraph, z: &[f64], out: &mut [f64]) {
    let n = g.n_grid;
    for i in 0..n {
        let (start, end) = (g.row_ptr[i], g.row_ptr[i + 1]);
        let cols = &g.col_idx[start..end];
        // The color neighbor is always last in a pixel row.
        let (&color, grid) = cols.split_last().expect("pixel rows hold their color edge");
        let nbrs: f64 = grid.iter().map(|&j| z[j as usize]).sum();
        out[i] = g.degree[i] * z[i] - g.mu * nbrs - z[color as usize];
    }
    for c in n..g.n_nodes() {
        out[c] = g.degree[c] * z[c];
    }
    for (i, &c) in g.pixel_color.iter().enumerate() {
        out[n + c as usize] -= z[i];
    }
}

/// Number of grid edges of an `h × w` 4-connected lattice.
pub fn grid_edge_count(h: usize, w: usize) -> usize {
    2 * h * w - h - w
}
