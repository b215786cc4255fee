//! The convex program in homogenized variables:
//!
//! ```text
//! min  Σ c_i w_i + s_i u_i
//! s.t. A - F W - G U ⪯ 0,   F = diag(r_i δ_i),  G = diag(δ_i / β_i)
//!      κ_lower,i w_i ≤ u_i ≤ κ_upper,i w_i
//!      r_i β_i w_i + r_i u_i = 1
//!      w_i ≥ 0
//! ```
//!
//! Eliminating `w` through the equality rows leaves one variable per node,
//! with diagonal `(δ_i / β_i)(1 + (1 - r_i) u_i)` and objective
//! `c_i / (r_i β_i) + (s_i - c_i / β_i) u_i`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::cost::CostModel;
use super::transform::NodeRates;
use crate::error::Result;
use crate::graph::Graph;
use crate::sais::SaisParams;

/// `w` eliminated: per node `D_i(u) = d0_i + d1_i u_i` on `[u_lower_i, u_upper_i]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReducedForm {
    pub d0: Vec<f64>,
    pub d1: Vec<f64>,
    pub u_lower: Vec<f64>,
    pub u_upper: Vec<f64>,
    pub slope: Vec<f64>,
    pub offset: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct SdpInstance {
    pub graph: Graph,
    pub params: SaisParams,
    pub cost: CostModel,
    /// `r_i δ_i`
    pub f_diag: Vec<f64>,
    /// `δ_i / β_i`
    pub g_diag: Vec<f64>,
    pub reduced: ReducedForm,
    /// Nodes with at least one neighbor. Isolated nodes never enter the
    /// matrix constraint and sit at `κ_lower`.
    pub active: Vec<usize>,
    active_adjacency: DMatrix<f64>,
}

/// Builds the program for `g`. The `kappa` field of `params` is ignored.
pub fn assemble_sdp(g: &Graph, params: &SaisParams, cost: &CostModel) -> Result<SdpInstance> {
    params.check_graph(g)?;
    cost.check_params(params)?;
    let n = g.node_count();
    let rates: Vec<NodeRates> = (0..n).map(|i| NodeRates::of(params, i)).collect();
    let f_diag = rates.iter().map(|p| p.r * p.delta).collect();
    let g_diag: Vec<f64> = rates.iter().map(|p| p.delta / p.beta).collect();
    let reduced = ReducedForm {
        d0: g_diag.clone(),
        d1: rates.iter().map(|p| p.delta / p.beta * (1.0 - p.r)).collect(),
        u_lower: rates
            .iter()
            .zip(&cost.nodes)
            .map(|(p, c)| p.u_from_kappa(c.kappa_lower))
            .collect(),
        u_upper: rates
            .iter()
            .zip(&cost.nodes)
            .map(|(p, c)| p.u_from_kappa(c.kappa_upper))
            .collect(),
        slope: cost.nodes.iter().map(|c| c.s - c.c / c.beta).collect(),
        offset: cost.nodes.iter().map(|c| c.c / (c.r * c.beta)).collect(),
    };
    let active: Vec<usize> = (0..n).filter(|&i| g.degree(i) > 0).collect();
    let mut index = vec![usize::MAX; n];
    for (k, &i) in active.iter().enumerate() {
        index[i] = k;
    }
    let m = active.len();
    let mut active_adjacency = DMatrix::zeros(m, m);
    for (k, &i) in active.iter().enumerate() {
        for &j in g.neighbors(i) {
            active_adjacency[(k, index[j])] = 1.0;
        }
    }
    Ok(SdpInstance {
        graph: g.clone(),
        params: params.clone(),
        cost: cost.clone(),
        f_diag,
        g_diag,
        reduced,
        active,
        active_adjacency,
    })
}

impl SdpInstance {
    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    pub fn rates(&self, i: usize) -> NodeRates {
        NodeRates::of(&self.params, i)
    }

    /// Adjacency restricted to the active nodes.
    pub fn active_adjacency(&self) -> &DMatrix<f64> {
        &self.active_adjacency
    }

    /// `F_ii w_i + G_ii u_i`, the diagonal the matrix constraint compares
    /// against `A`.
    pub fn diagonal(&self, i: usize, u: f64, w: f64) -> f64 {
        self.f_diag[i] * w + self.g_diag[i] * u
    }

    /// `A + ε I - diag(d)` over the active nodes, `d` indexed like `active`.
    pub fn lemma_matrix(&self, d: &[f64], epsilon: f64) -> DMatrix<f64> {
        let mut m = self.active_adjacency.clone();
        for (k, &dk) in d.iter().enumerate() {
            m[(k, k)] += epsilon - dk;
        }
        m
    }

    /// Objective `Σ c_i w_i + s_i u_i` over all nodes.
    pub fn objective(&self, u: &[f64], w: &[f64]) -> f64 {
        self.cost
            .nodes
            .iter()
            .zip(u.iter().zip(w))
            .map(|(c, (&u, &w))| c.linear(u, w))
            .sum()
    }
}
