//! Shared fixtures for the benchmarks.

use sais_core::allocation::{assemble_sdp, CostModel, SdpInstance};
use sais_core::eigen::lambda_max;
use sais_core::graph::{Graph, GraphKind};
use sais_core::sais::SaisParams;

/// Preferential-attachment graph with `m0 = 2`.
pub fn pa_graph(n: usize, seed: u64) -> Graph {
    Graph::generate(GraphKind::PreferentialAttachment { m0: 2 }, n, seed).expect("valid generator")
}

/// Homogeneous instance at `λ1 β / δ = 1.5` with `δ = 1`, `r = 0.5` and
/// awareness in `[0, 3 β]`.
pub fn stressed_instance(g: &Graph) -> SdpInstance {
    let beta = 1.5 / lambda_max(g).expect("eigenvalue");
    let params = SaisParams::homogeneous(g.node_count(), beta, 1.0, 0.0, 0.5).expect("valid rates");
    let cost = CostModel::fit(&params, &[1.0], &[0.0], &[3.0 * beta]).expect("valid cost");
    assemble_sdp(g, &params, &cost).expect("instance")
}
