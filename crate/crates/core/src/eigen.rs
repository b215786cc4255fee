//! Largest eigenpair of real symmetric matrices and operators.
//!
//! Small problems (`n <= dense_limit`) are reduced to tridiagonal form with
//! Householder reflections and diagonalized by the implicit QL method. Larger
//! problems run Lanczos with full reorthogonalization and explicit restarts,
//! touching the operator only through matrix-vector products.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// A real symmetric linear operator. Symmetry is the implementor's promise.
pub trait SymmetricOperator {
    fn dim(&self) -> usize;

    /// `y = M x`
    fn apply(&self, x: &[f64], y: &mut [f64]);

    fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        let mut e = vec![0.0; n];
        let mut col = vec![0.0; n];
        for j in 0..n {
            e[j] = 1.0;
            self.apply(&e, &mut col);
            e[j] = 0.0;
            for i in 0..n {
                m[(i, j)] = col[i];
            }
        }
        m
    }

    /// Upper bound on the spectral norm, used to scale tolerances.
    fn norm_bound(&self) -> f64;
}

impl SymmetricOperator for DMatrix<f64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let n = self.nrows();
        for (i, yi) in y.iter_mut().enumerate().take(n) {
            *yi = (0..n).map(|j| self[(i, j)] * x[j]).sum();
        }
    }

    fn to_dense(&self) -> DMatrix<f64> {
        self.clone()
    }

    fn norm_bound(&self) -> f64 {
        self.row_iter()
            .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

impl SymmetricOperator for Graph {
    fn dim(&self) -> usize {
        self.node_count()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.adjacency_apply(x, y);
    }

    fn to_dense(&self) -> DMatrix<f64> {
        self.adjacency_matrix()
    }

    fn norm_bound(&self) -> f64 {
        self.max_degree() as f64
    }
}

/// `diag(scale) A diag(scale) + diag(shift)` for the adjacency `A` of a graph.
///
/// Both the symmetrized stability matrix and the `A - diag(y)` form of the
/// die-out condition have this shape.
#[derive(Clone, Debug)]
pub struct ScaledAdjacency<'a> {
    pub graph: &'a Graph,
    pub scale: Vec<f64>,
    pub shift: Vec<f64>,
}

impl SymmetricOperator for ScaledAdjacency<'_> {
    fn dim(&self) -> usize {
        self.graph.node_count()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate().take(self.dim()) {
            let coupled: f64 = self.graph.neighbors(i).iter().map(|&j| self.scale[j] * x[j]).sum();
            *yi = self.scale[i] * coupled + self.shift[i] * x[i];
        }
    }

    fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.shift[i];
            for &j in self.graph.neighbors(i) {
                m[(i, j)] = self.scale[i] * self.scale[j];
            }
        }
        m
    }

    fn norm_bound(&self) -> f64 {
        (0..self.dim())
            .map(|i| {
                let coupled: f64 = self.graph.neighbors(i).iter().map(|&j| self.scale[j].abs()).sum();
                self.scale[i].abs() * coupled + self.shift[i].abs()
            })
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenOptions {
    /// Residual tolerance, relative to `max(1, ||M||)`.
    pub tol: f64,
    /// Cap on Lanczos matrix-vector products.
    pub max_iterations: usize,
    /// Largest dimension handled by the dense solver.
    pub dense_limit: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iterations: 100_000,
            dense_limit: 512,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenReport {
    pub lambda1: f64,
    /// Unit eigenvector, sign chosen so its entries sum to a nonnegative value.
    pub eigvec: Vec<f64>,
    pub iterations: usize,
    /// `||M v - lambda1 v||_2`
    pub residual: f64,
}

/// Algebraically largest eigenvalue of `op` with its eigenvector.
pub fn largest_eigenvalue<O: SymmetricOperator + ?Sized>(op: &O, opts: &EigenOptions) -> Result<EigenReport> {
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "eigen tolerance {} must be positive",
            opts.tol
        )));
    }
    let n = op.dim();
    if n == 0 {
        return Err(Error::InvalidParameter("eigenvalue of an empty operator".into()));
    }
    let scale = op.norm_bound().max(1.0);
    let report = if n <= opts.dense_limit {
        let spectrum = symmetric_eigen(&op.to_dense())?;
        let mut v = spectrum.vector(n - 1);
        orient(&mut v);
        let lambda = spectrum.values[n - 1];
        EigenReport {
            lambda1: lambda,
            residual: residual(op, lambda, &v),
            eigvec: v,
            iterations: spectrum.sweeps,
        }
    } else {
        lanczos(op, opts, scale)?
    };
    if report.residual > opts.tol * scale {
        return Err(Error::EigenNoConvergence {
            iterations: report.iterations,
            residual: report.residual,
            lambda: report.lambda1,
        });
    }
    Ok(report)
}

/// Convenience: only the value.
pub fn lambda_max<O: SymmetricOperator + ?Sized>(op: &O) -> Result<f64> {
    largest_eigenvalue(op, &EigenOptions::default()).map(|r| r.lambda1)
}

fn residual<O: SymmetricOperator + ?Sized>(op: &O, lambda: f64, v: &[f64]) -> f64 {
    let mut mv = vec![0.0; v.len()];
    op.apply(v, &mut mv);
    mv.iter()
        .zip(v)
        .map(|(a, b)| (a - lambda * b).powi(2))
        .sum::<f64>()
        .sqrt()
}

fn orient(v: &mut [f64]) {
    let sum: f64 = v.iter().sum();
    let flip = if sum.abs() > 1e-12 {
        sum < 0.0
    } else {
        let big = v
            .iter()
            .copied()
            .fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
        big < 0.0
    };
    if flip {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    norm
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn lanczos<O: SymmetricOperator + ?Sized>(op: &O, opts: &EigenOptions, scale: f64) -> Result<EigenReport> {
    let n = op.dim();
    let krylov = n.min(64);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5A15);
    let mut start: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
    normalize(&mut start);

    let mut matvecs = 0usize;
    let mut best: Option<(f64, f64)> = None;
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(krylov);
    let mut w = vec![0.0; n];

    while matvecs < opts.max_iterations {
        basis.clear();
        basis.push(start.clone());
        let mut alpha = Vec::with_capacity(krylov);
        let mut beta: Vec<f64> = Vec::with_capacity(krylov);
        let mut tail = 0.0;
        for k in 0..krylov {
            op.apply(&basis[k], &mut w);
            matvecs += 1;
            let a = dot(&w, &basis[k]);
            alpha.push(a);
            // full reorthogonalization, twice for stability
            for _ in 0..2 {
                for q in &basis {
                    let c = dot(&w, q);
                    w.iter_mut().zip(q).for_each(|(wi, qi)| *wi -= c * qi);
                }
            }
            let b = normalize(&mut w);
            tail = b;
            if k + 1 == krylov || b <= f64::EPSILON * scale || matvecs >= opts.max_iterations {
                break;
            }
            beta.push(b);
            basis.push(w.clone());
        }

        let m = alpha.len();
        let (values, vectors) = tridiagonal_eigen(&alpha, &beta, true)?;
        let theta = values[m - 1];
        let last = vectors[(m - 1) * m + (m - 1)];
        let ritz_residual = (tail * last).abs();

        let mut v = vec![0.0; n];
        for (j, q) in basis.iter().enumerate() {
            let s = vectors[j * m + (m - 1)];
            v.iter_mut().zip(q).for_each(|(vi, qi)| *vi += s * qi);
        }
        normalize(&mut v);
        if best.map_or(true, |(_, r)| ritz_residual < r) {
            best = Some((theta, ritz_residual));
        }
        if ritz_residual <= 0.5 * opts.tol * scale {
            let lambda = dot(
                &{
                    let mut mv = vec![0.0; n];
                    op.apply(&v, &mut mv);
                    mv
                },
                &v,
            );
            let res = residual(op, lambda, &v);
            if res <= opts.tol * scale {
                orient(&mut v);
                return Ok(EigenReport {
                    lambda1: lambda,
                    eigvec: v,
                    iterations: matvecs,
                    residual: res,
                });
            }
        }
        start = v;
    }
    let (lambda, residual) = best.unwrap_or((f64::NAN, f64::INFINITY));
    Err(Error::EigenNoConvergence {
        iterations: matvecs,
        residual,
        lambda,
    })
}

/// Full spectrum of a dense symmetric matrix.
#[derive(Clone, Debug)]
pub struct SymmetricSpectrum {
    /// Ascending.
    pub values: Vec<f64>,
    /// Row-major `n x n`; column `j` is the eigenvector of `values[j]`.
    vectors: Vec<f64>,
    n: usize,
    sweeps: usize,
}

impl SymmetricSpectrum {
    pub fn vector(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.vectors[i * self.n + j]).collect()
    }

    pub fn dim(&self) -> usize {
        self.n
    }
}

/// Eigen-decomposition by Householder tridiagonalization and implicit QL.
/// Only the lower triangle of `m` is read.
pub fn symmetric_eigen(m: &DMatrix<f64>) -> Result<SymmetricSpectrum> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::DimensionMismatch {
            what: "square matrix",
            expected: n,
            got: m.ncols(),
        });
    }
    if n == 0 {
        return Ok(SymmetricSpectrum {
            values: vec![],
            vectors: vec![],
            n,
            sweeps: 0,
        });
    }
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            v[i * n + j] = m[(i, j)];
            v[j * n + i] = m[(i, j)];
        }
    }
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    householder_tridiagonalize(n, &mut v, &mut d, &mut e);
    let sweeps = implicit_ql(n, &mut v, &mut d, &mut e, true)?;
    let (values, vectors) = sort_ascending(n, d, v);
    Ok(SymmetricSpectrum {
        values,
        vectors,
        n,
        sweeps,
    })
}

/// Eigenvalues (ascending) of the symmetric tridiagonal matrix with diagonal
/// `diag` and off-diagonal `off` (length `n - 1`). With `vectors`, also
/// returns the row-major eigenvector matrix.
pub fn tridiagonal_eigen(diag: &[f64], off: &[f64], vectors: bool) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = diag.len();
    if n == 0 {
        return Ok((vec![], vec![]));
    }
    let mut v = vec![0.0; if vectors { n * n } else { 0 }];
    for i in 0..n {
        if vectors {
            v[i * n + i] = 1.0;
        }
    }
    let mut d = diag.to_vec();
    // implicit_ql expects e[i] to hold the subdiagonal entry (i, i - 1)
    let mut e = vec![0.0; n];
    e[1..n].copy_from_slice(&off[..(n - 1)]);
    implicit_ql(n, &mut v, &mut d, &mut e, vectors)?;
    if vectors {
        Ok(sort_ascending(n, d, v))
    } else {
        d.sort_by(f64::total_cmp);
        Ok((d, v))
    }
}

fn sort_ascending(n: usize, d: Vec<f64>, v: Vec<f64>) -> (Vec<f64>, Vec<f64>) {
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let values = order.iter().map(|&k| d[k]).collect();
    let mut vectors = vec![0.0; n * n];
    for (new, &old) in order.iter().enumerate() {
        for i in 0..n {
            vectors[i * n + new] = v[i * n + old];
        }
    }
    (values, vectors)
}

/// Reduces the symmetric matrix in `v` (row-major) to tridiagonal form.
/// On return `d` is the diagonal, `e[i]` the subdiagonal entry `(i, i-1)`,
/// and `v` the accumulated orthogonal transform.
fn householder_tridiagonalize(n: usize, v: &mut [f64], d: &mut [f64], e: &mut [f64]) {
    let at = |i: usize, j: usize| i * n + j;
    for j in 0..n {
        d[j] = v[at(n - 1, j)];
    }
    for i in (1..n).rev() {
        let scale: f64 = d[..i].iter().map(|x| x.abs()).sum();
        let mut h = 0.0;
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = 0.0;
                v[at(j, i)] = 0.0;
            }
        } else {
            for dk in d[..i].iter_mut() {
                *dk /= scale;
                h += *dk * *dk;
            }
            let f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            e[..i].iter_mut().for_each(|x| *x = 0.0);

            for j in 0..i {
                let f = d[j];
                v[at(j, i)] = f;
                let mut g = e[j] + v[at(j, j)] * f;
                for k in j + 1..i {
                    g += v[at(k, j)] * d[k];
                    e[k] += v[at(k, j)] * f;
                }
                e[j] = g;
            }
            let mut f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                let f = d[j];
                let g = e[j];
                for k in j..i {
                    v[at(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }

    for i in 0..n - 1 {
        v[at(n - 1, i)] = v[at(i, i)];
        v[at(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[at(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[at(k, i + 1)] * v[at(k, j)];
                }
                for k in 0..=i {
                    v[at(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[at(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[at(n - 1, j)];
        v[at(n - 1, j)] = 0.0;
    }
    v[at(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

/// Implicit QL iterations on the tridiagonal `(d, e)`; rotations are applied
/// to `v` when `vectors` is set. Returns the number of QL sweeps.
fn implicit_ql(n: usize, v: &mut [f64], d: &mut [f64], e: &mut [f64], vectors: bool) -> Result<usize> {
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let eps = f64::EPSILON;
    let max_sweeps = 30 * n.max(1);
    let mut sweeps = 0;
    let mut f = 0.0;
    let mut tst1 = 0.0f64;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            loop {
                sweeps += 1;
                if sweeps > max_sweeps {
                    return Err(Error::EigenNoConvergence {
                        iterations: sweeps,
                        residual: e[l].abs(),
                        lambda: d[l],
                    });
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d[l + 2..n].iter_mut() {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if vectors {
                        for k in 0..n {
                            let hk = v[k * n + i + 1];
                            v[k * n + i + 1] = s * v[k * n + i] + c * hk;
                            v[k * n + i] = c * v[k * n + i] - s * hk;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(sweeps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphKind;
    use approx::assert_abs_diff_eq;

    fn gen(kind: GraphKind, n: usize) -> Graph {
        Graph::generate(kind, n, 1).unwrap()
    }

    #[test]
    fn k2_has_unit_top_eigenvalue() {
        let r = largest_eigenvalue(&gen(GraphKind::Complete, 2), &EigenOptions::default()).unwrap();
        assert_abs_diff_eq!(r.lambda1, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.eigvec[0], std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-12);
    }

    #[test]
    fn star_with_four_leaves() {
        // sqrt(n - 1) for the star on n = 5 nodes
        let r = largest_eigenvalue(&gen(GraphKind::Star, 5), &EigenOptions::default()).unwrap();
        assert_abs_diff_eq!(r.lambda1, 2.0, epsilon = 1e-12);
        assert!(r.eigvec.iter().all(|&x| x > 0.0));
    }

    #[test]
    fn regular_cycle() {
        let r = largest_eigenvalue(&gen(GraphKind::Cycle, 4), &EigenOptions::default()).unwrap();
        assert_abs_diff_eq!(r.lambda1, 2.0, epsilon = 1e-12);
        assert!(r.residual <= 1e-10);
        let norm: f64 = r.eigvec.iter().map(|x| x * x).sum();
        assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn path_spectrum_closed_form() {
        // eigenvalues of P_n are 2 cos(k pi / (n + 1))
        let n = 9;
        let spec = symmetric_eigen(&gen(GraphKind::Path, n).adjacency_matrix()).unwrap();
        for k in 1..=n {
            let expected = 2.0 * (k as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos();
            assert_abs_diff_eq!(spec.values[n - k], expected, epsilon = 1e-12);
        }
    }

    #[test]
    fn negative_definite_diagonal() {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![-3.0, -1.0, -2.0]));
        let r = largest_eigenvalue(&m, &EigenOptions::default()).unwrap();
        assert_abs_diff_eq!(r.lambda1, -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.eigvec[1].abs(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn one_by_one() {
        let m = DMatrix::from_element(1, 1, -0.75);
        assert_eq!(lambda_max(&m).unwrap(), -0.75);
    }

    #[test]
    fn empty_graph_zero() {
        let r = largest_eigenvalue(&Graph::empty(4), &EigenOptions::default()).unwrap();
        assert_eq!(r.lambda1, 0.0);
    }

    #[test]
    fn lanczos_matches_dense_on_forced_path() {
        let g = Graph::generate(GraphKind::ErdosRenyi { p: 0.1 }, 120, 4).unwrap();
        let dense = largest_eigenvalue(&g, &EigenOptions::default()).unwrap();
        let opts = EigenOptions {
            dense_limit: 10,
            ..EigenOptions::default()
        };
        let sparse = largest_eigenvalue(&g, &opts).unwrap();
        assert_abs_diff_eq!(dense.lambda1, sparse.lambda1, epsilon = 1e-9);
        let overlap = dot(&dense.eigvec, &sparse.eigvec).abs();
        assert_abs_diff_eq!(overlap, 1.0, epsilon = 1e-8);
    }

    #[test]
    fn lanczos_large_preferential_attachment() {
        let g = Graph::generate(GraphKind::PreferentialAttachment { m0: 3 }, 800, 2).unwrap();
        let r = largest_eigenvalue(&g, &EigenOptions::default()).unwrap();
        assert!(r.residual <= 1e-10 * g.max_degree() as f64);
        let dmax = g.max_degree() as f64;
        assert!(r.lambda1 <= dmax && r.lambda1 >= dmax.sqrt());
        assert!(r.eigvec.iter().all(|&x| x > 0.0));
    }

    #[test]
    fn scaled_adjacency_dense_form() {
        let g = gen(GraphKind::Path, 3);
        let op = ScaledAdjacency {
            graph: &g,
            scale: vec![1.0, 2.0, 3.0],
            shift: vec![-1.0, -2.0, -3.0],
        };
        let m = op.to_dense();
        let via_apply = SymmetricOperator::to_dense(&DenseProbe(&op));
        assert_eq!(m, via_apply);
        assert_eq!(m[(0, 1)], 2.0);
        assert_eq!(m[(1, 2)], 6.0);
        assert_eq!(m[(2, 2)], -3.0);
    }

    struct DenseProbe<'a>(&'a ScaledAdjacency<'a>);

    impl SymmetricOperator for DenseProbe<'_> {
        fn dim(&self) -> usize {
            self.0.dim()
        }
        fn apply(&self, x: &[f64], y: &mut [f64]) {
            self.0.apply(x, y)
        }
        fn norm_bound(&self) -> f64 {
            self.0.norm_bound()
        }
    }

    #[test]
    fn invalid_tolerance_rejected() {
        let opts = EigenOptions {
            tol: 0.0,
            ..EigenOptions::default()
        };
        assert!(largest_eigenvalue(&gen(GraphKind::Path, 3), &opts).is_err());
    }

    #[test]
    fn tridiagonal_values_only() {
        let (vals, _) = tridiagonal_eigen(&[2.0, 2.0], &[1.0], false).unwrap();
        assert_abs_diff_eq!(vals[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(vals[1], 3.0, epsilon = 1e-14);
    }
}
