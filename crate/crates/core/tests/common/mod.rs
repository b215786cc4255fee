//! Instance builders and independent reference computations shared by the
//! integration suites. The references deliberately go through nalgebra
//! rather than the crate's own eigensolvers.

#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sais_core::allocation::{assemble_sdp, CostModel, SdpInstance};
use sais_core::graph::{Graph, GraphKind};
use sais_core::sais::SaisParams;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Dense `L B A - M D`, built from the rate definitions directly.
pub fn stability_matrix(g: &Graph, p: &SaisParams) -> DMatrix<f64> {
    let n = g.node_count();
    let a = g.adjacency_matrix();
    DMatrix::from_fn(n, n, |i, j| {
        let kbar = p.kappa[i] / p.beta[i];
        let l = p.r[i] * kbar + p.r[i];
        let m = kbar + p.r[i];
        let mut v = l * p.beta[i] * a[(i, j)];
        if i == j {
            v -= m * p.delta[i];
        }
        v
    })
}

/// Largest real part over the complex spectrum (Schur based).
pub fn max_real_eigenvalue(m: &DMatrix<f64>) -> f64 {
    m.complex_eigenvalues()
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn max_symmetric_eigenvalue(m: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `(r δ + κ δ / β) / (r β + r κ)` in the unfactored form.
pub fn lemma_diagonal(p: &SaisParams) -> Vec<f64> {
    (0..p.len())
        .map(|i| {
            (p.r[i] * p.delta[i] + p.kappa[i] * p.delta[i] / p.beta[i]) / (p.r[i] * p.beta[i] + p.r[i] * p.kappa[i])
        })
        .collect()
}

pub fn lemma_matrix(g: &Graph, y: &[f64]) -> DMatrix<f64> {
    let mut a = g.adjacency_matrix();
    for (i, yi) in y.iter().enumerate() {
        a[(i, i)] -= yi;
    }
    a
}

pub fn adjacency_lambda(g: &Graph) -> f64 {
    max_symmetric_eigenvalue(&g.adjacency_matrix())
}

/// Connected Erdős–Rényi graph: retries seeds until connected.
pub fn connected_er(n: usize, p: f64, seed: u64) -> Graph {
    (seed..)
        .map(|s| Graph::generate(GraphKind::ErdosRenyi { p }, n, s).unwrap())
        .find(|g| g.is_connected())
        .unwrap()
}

/// Heterogeneous instance that is above threshold at `κ = 0` and
/// reachable at `κ_upper = 3 β`: `δ_i / β_i` is drawn between 0.4 and 0.8
/// times `λ1(A)` and `r_i` between 0.1 and 0.3, so `y(κ_upper)` exceeds
/// `λ1(A)` at every node.
pub fn random_allocation_instance(g: &Graph, seed: u64) -> SdpInstance {
    let n = g.node_count();
    let l1 = adjacency_lambda(g);
    let mut rng = rng(seed);
    let beta: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..1.5)).collect();
    let r: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..0.3)).collect();
    let delta: Vec<f64> = beta.iter().map(|b| b * l1 * rng.random_range(0.4..0.8)).collect();
    let c_bar: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..2.0)).collect();
    let params = SaisParams::new(beta.clone(), delta, vec![0.0; n], r).unwrap();
    let upper: Vec<f64> = beta.iter().map(|b| 3.0 * b).collect();
    let cost = CostModel::fit(&params, &c_bar, &[0.0], &upper).unwrap();
    assemble_sdp(g, &params, &cost).unwrap()
}

/// Random rates, including the awareness rate, over a wide range.
pub fn random_params(n: usize, rng: &mut ChaCha8Rng) -> SaisParams {
    let beta: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..2.0)).collect();
    let delta: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..3.0)).collect();
    let kappa: Vec<f64> = (0..n)
        .map(|_| {
            if rng.random_bool(0.2) {
                0.0
            } else {
                rng.random_range(0.0..3.0)
            }
        })
        .collect();
    let r: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..0.95)).collect();
    SaisParams::new(beta, delta, kappa, r).unwrap()
}

/// The triangle with `β = δ = 1`, `κ ∈ [0, 1]`, `C̄ = 1`.
pub fn unit_triangle(r: f64) -> SdpInstance {
    let g = Graph::generate(GraphKind::Complete, 3, 0).unwrap();
    let params = SaisParams::homogeneous(3, 1.0, 1.0, 0.0, r).unwrap();
    let cost = CostModel::fit(&params, &[1.0], &[0.0], &[1.0]).unwrap();
    assemble_sdp(&g, &params, &cost).unwrap()
}

/// Mean and standard error.
pub fn mean_and_se(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// ER(50) instance used for the dynamics checks: `δ = 1`, `r = 0.5`,
/// `β = 1.5 δ / λ1(A)`, awareness in `[0, 3 β]`.
pub struct DynamicsCase {
    pub graph: Graph,
    pub instance: SdpInstance,
    pub lower: SaisParams,
}

pub fn dynamics_case() -> DynamicsCase {
    let graph = connected_er(50, 0.1, 11);
    let delta = 1.0;
    let beta = 1.5 * delta / adjacency_lambda(&graph);
    let lower = SaisParams::homogeneous(50, beta, delta, 0.0, 0.5).unwrap();
    let cost = CostModel::fit(&lower, &[1.0], &[0.0], &[3.0 * beta]).unwrap();
    let instance = assemble_sdp(&graph, &lower, &cost).unwrap();
    DynamicsCase { graph, instance, lower }
}
