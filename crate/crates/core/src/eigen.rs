//! Fiedler vector of the generalized problem `L x = λ D x`.
//!
//! The solver works on the symmetric form `A = D^{-1/2} L D^{-1/2}` with the
//! trivial eigenvector `D^{1/2} 1` projected out, using a block-size-one
//! LOBPCG iteration: each step does a Rayleigh-Ritz on the span of the current
//! iterate, its preconditioned residual and the previous search direction.
//! Only Laplacian products and vector operations are needed, so memory stays
//! `O(n + k)`.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{apply_laplacian_into, laplacian_quadratic, SparseGraph};
use crate::{Error, Result};

/// Eigenvalues at or below this are treated as a second nullspace direction,
/// meaning the graph is disconnected.
pub const DEGENERACY_EPS: f64 = 1e-10;

/// Iterations between explicit recomputations of `A u`, which otherwise
/// drifts through the three-term recurrences.
const REFRESH_EVERY: usize = 25;

#[derive(Debug, Clone)]
pub struct EigenResult {
    /// D-normalized eigenvector over all `n + k` nodes.
    pub vector: Vec<f64>,
    pub value: f64,
    /// `‖L x − λ D x‖₂ / ‖x‖_D` recomputed from scratch at the end.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Set when the second eigenvalue is numerically zero.
    pub degenerate: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct EigenParams {
    pub tol: f64,
    pub max_iters: usize,
    pub seed: u64,
}

impl Default for EigenParams {
    fn default() -> Self {
        EigenParams { tol: 1e-6, max_iters: 2000, seed: 0 }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `N` inner products `xs[m] · ys[m]` in a single pass.
fn multi_dot<const N: usize>(xs: [&[f64]; N], ys: [&[f64]; N]) -> [f64; N] {
    let mut acc = [0.0; N];
    for i in 0..xs[0].len() {
        for m in 0..N {
            acc[m] += xs[m][i] * ys[m][i];
        }
    }
    acc
}

/// `v -= Σ c_m b_m` (and the same on the images when given); returns `‖v‖²`.
fn subtract<const N: usize>(
    v: &mut [f64],
    av: Option<&mut [f64]>,
    basis: [&[f64]; N],
    abasis: Option<[&[f64]; N]>,
    c: [f64; N],
) -> f64 {
    let mut sq = 0.0;
    for (i, vi) in v.iter_mut().enumerate() {
        for m in 0..N {
            *vi -= c[m] * basis[m][i];
        }
        sq += *vi * *vi;
    }
    if let (Some(av), Some(ab)) = (av, abasis) {
        for (i, ai) in av.iter_mut().enumerate() {
            for m in 0..N {
                *ai -= c[m] * ab[m][i];
            }
        }
    }
    sq
}

fn scale2(alpha: f64, x: &mut [f64], y: &mut [f64]) {
    x.iter_mut().zip(y.iter_mut()).for_each(|(a, b)| {
        *a *= alpha;
        *b *= alpha;
    });
}

/// The normalized operator `A = D^{-1/2} L D^{-1/2}` and its deflation
/// direction.
struct NormalizedOperator<'a> {
    graph: &'a SparseGraph,
    inv_sqrt_deg: Vec<f64>,
    sqrt_deg: Vec<f64>,
    /// Unit vector along `D^{1/2} 1`.
    null_dir: Vec<f64>,
    /// Inverse diagonal of `A`; `None` when it is the identity.
    precond: Option<Vec<f64>>,
    scratch: Vec<f64>,
}

impl<'a> NormalizedOperator<'a> {
    fn new(graph: &'a SparseGraph) -> Result<Self> {
        if graph.degree.iter().any(|&d| !(d > 0.0)) {
            return Err(Error::invalid("every node needs positive degree"));
        }
        let sqrt_deg: Vec<f64> = graph.degree.iter().map(|d| d.sqrt()).collect();
        let inv_sqrt_deg = sqrt_deg.iter().map(|s| 1.0 / s).collect();
        let total = graph.degree.iter().sum::<f64>().sqrt();
        let null_dir = sqrt_deg.iter().map(|s| s / total).collect();
        // diag(A)_i = L_ii / d_i, which differs from 1 only through self-loops.
        let precond: Vec<f64> = (0..graph.n_nodes())
            .map(|i| {
                let self_w: f64 = graph.row(i).filter(|&(j, _)| j == i).map(|(_, w)| w).sum();
                let diag = (graph.degree[i] - self_w) / graph.degree[i];
                if diag > 0.0 { 1.0 / diag } else { 1.0 }
            })
            .collect();
        let precond = precond.iter().any(|&p| p != 1.0).then_some(precond);
        Ok(NormalizedOperator {
            graph,
            inv_sqrt_deg,
            sqrt_deg,
            null_dir,
            precond,
            scratch: vec![0.0; graph.n_nodes()],
        })
    }

    fn apply(&mut self, u: &[f64], out: &mut [f64]) {
        for ((s, &ui), &w) in self.scratch.iter_mut().zip(u).zip(&self.inv_sqrt_deg) {
            *s = ui * w;
        }
        apply_laplacian_into(self.graph, &self.scratch, out);
        out.iter_mut().zip(&self.inv_sqrt_deg).for_each(|(o, &w)| *o *= w);
    }

    /// Writes `r = A u − λ u` and returns the generalized residual
    /// `‖D^{1/2} r‖₂` of the D-normalized vector `D^{-1/2} u`.
    fn residual_into(&self, u: &[f64], au: &[f64], lambda: f64, r: &mut [f64]) -> f64 {
        let mut sq = 0.0;
        for i in 0..u.len() {
            let ri = au[i] - lambda * u[i];
            r[i] = ri;
            let s = self.sqrt_deg[i] * ri;
            sq += s * s;
        }
        sq.sqrt()
    }

    /// Projects `v` off the null direction and normalizes it, applying the
    /// same scaling to `av` (unchanged by the projection since `A` kills the
    /// null direction). Returns `vᵀ(A v)` after normalization.
    fn deflate_normalize(&self, v: &mut [f64], av: &mut [f64]) -> f64 {
        let [c, sq, vav, nav] = multi_dot([&self.null_dir, v, v, &self.null_dir], [v, v, av, av]);
        let nrm = (sq - c * c).max(0.0).sqrt();
        for ((vi, ai), ni) in v.iter_mut().zip(av.iter_mut()).zip(&self.null_dir) {
            *vi = (*vi - c * ni) / nrm;
            *ai /= nrm;
        }
        (vav - c * nav) / (nrm * nrm)
    }
}

/// Second-smallest eigenpair of `L x = λ D x`.
///
/// Non-convergence within `max_iters` is not an error: the best iterate seen
/// at a checkpoint (every few iterations, where `A u` is recomputed exactly)
/// or the final one, whichever has the smaller residual, is returned with
/// `converged == false`.
pub fn fiedler(g: &SparseGraph, params: &EigenParams) -> Result<EigenResult> {
    if !(params.tol > 0.0) {
        return Err(Error::invalid(format!("tolerance must be positive, got {}", params.tol)));
    }
    let n = g.n_nodes();
    if n < 2 {
        return Err(Error::invalid("need at least two nodes"));
    }
    let mut op = NormalizedOperator::new(g)?;

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut u: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut au = vec![0.0; n];
    op.apply(&u, &mut au);
    let mut lambda = op.deflate_normalize(&mut u, &mut au);

    let mut w = vec![0.0; n];
    let mut aw = vec![0.0; n];
    let mut p: Vec<f64> = vec![0.0; n];
    let mut ap: Vec<f64> = vec![0.0; n];
    let mut have_p = false;

    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut converged = false;
    let mut iterations = 0;
    let mut fresh = true;
    let mut residual;

    loop {
        residual = op.residual_into(&u, &au, lambda, &mut w);
        if residual <= params.tol {
            if fresh {
                converged = true;
                break;
            }
            // Confirm with an exact product before stopping.
            op.apply(&u, &mut au);
            lambda = dot(&u, &au);
            fresh = true;
            continue;
        }
        if fresh && best.as_ref().is_none_or(|b| residual < b.0) {
            best = Some((residual, u.clone()));
        }
        if iterations >= params.max_iters {
            break;
        }
        iterations += 1;

        if let Some(pc) = &op.precond {
            w.iter_mut().zip(pc).for_each(|(wi, c)| *wi *= c);
        }
        // Two rounds of Gram-Schmidt against the null direction and u.
        let start = dot(&w, &w).sqrt();
        let mut sq = 0.0;
        for _ in 0..2 {
            let c = multi_dot([&op.null_dir, &u], [&w, &w]);
            sq = subtract(&mut w, None, [&op.null_dir, &u], None, c);
        }
        if !(sq.sqrt() > 1e-10 * start) {
            break;
        }
        let inv = 1.0 / sq.sqrt();
        w.iter_mut().for_each(|v| *v *= inv);
        op.apply(&w, &mut aw);
        if have_p {
            let start = dot(&p, &p).sqrt();
            for _ in 0..2 {
                let c = multi_dot([&u, &w], [&p, &p]);
                sq = subtract(&mut p, Some(&mut ap), [&u, &w], Some([&au, &aw]), c);
            }
            have_p = sq.sqrt() > 1e-10 * start;
            if have_p {
                scale2(1.0 / sq.sqrt(), &mut p, &mut ap);
            }
        }

        // Rayleigh-Ritz on the orthonormal basis [u, w, p].
        let dim = if have_p { 3 } else { 2 };
        let gram = if have_p {
            let [uu, ww, pp, uw, wu, up, pu, wp, pw] = multi_dot(
                [&u, &w, &p, &u, &w, &u, &p, &w, &p],
                [&au, &aw, &ap, &aw, &au, &ap, &au, &ap, &aw],
            );
            let (uw, up, wp) = (0.5 * (uw + wu), 0.5 * (up + pu), 0.5 * (wp + pw));
            DMatrix::from_row_slice(3, 3, &[uu, uw, up, uw, ww, wp, up, wp, pp])
        } else {
            let [uu, ww, uw, wu] = multi_dot([&u, &w, &u, &w], [&au, &aw, &aw, &au]);
            let uw = 0.5 * (uw + wu);
            DMatrix::from_row_slice(2, 2, &[uu, uw, uw, ww])
        };
        let eig = SymmetricEigen::new(gram);
        let c = eig.eigenvectors.column(eig.eigenvalues.imin());
        let (cu, cw, cp) = (c[0], c[1], if dim == 3 { c[2] } else { 0.0 });

        // New direction p = cw w + cp p, new iterate u = cu u + p.
        for i in 0..n {
            let pi = cw * w[i] + cp * p[i];
            let api = cw * aw[i] + cp * ap[i];
            p[i] = pi;
            ap[i] = api;
            u[i] = cu * u[i] + pi;
            au[i] = cu * au[i] + api;
        }
        have_p = true;
        lambda = op.deflate_normalize(&mut u, &mut au);
        fresh = iterations % REFRESH_EVERY == 0;
        if fresh {
            op.apply(&u, &mut au);
            lambda = dot(&u, &au);
        }
    }

    if !converged {
        if !fresh {
            op.apply(&u, &mut au);
            lambda = dot(&u, &au);
            residual = op.residual_into(&u, &au, lambda, &mut w);
        }
        if let Some((r, v)) = best.filter(|b| b.0 < residual) {
            u = v;
            op.apply(&u, &mut au);
            lambda = dot(&u, &au);
            residual = r;
        }
    }

    let mut x: Vec<f64> = u.iter().zip(&op.inv_sqrt_deg).map(|(ui, w)| ui * w).collect();
    let mut lead = 0;
    for (i, v) in x.iter().enumerate() {
        if v.abs() > x[lead].abs() {
            lead = i;
        }
    }
    if x[lead] < 0.0 {
        x.iter_mut().for_each(|v| *v = -*v);
    }
    Ok(EigenResult {
        vector: x,
        value: lambda,
        residual,
        iterations,
        converged,
        degenerate: lambda <= DEGENERACY_EPS,
    })
}

/// Rayleigh quotient `zᵀLz / zᵀDz`.
pub fn rayleigh(g: &SparseGraph, z: &[f64]) -> Result<f64> {
    let num = laplacian_quadratic(g, z)?;
    let den: f64 = z.iter().zip(&g.degree).map(|(v, d)| d * v * v).sum();
    if den == 0.0 {
        return Err(Error::invalid("Rayleigh quotient of the zero vector"));
    }
    Ok(num / den)
}
