use log::warn;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::SaisParams;
use crate::eigen::{largest_eigenvalue, EigenOptions, ScaledAdjacency};
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Outcome of the spectral die-out test at one parameter point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    /// Largest eigenvalue of `L B A - M D`. Values within eigensolver
    /// accuracy of zero are reported as exactly zero.
    pub margin: f64,
    /// Per-node `(r δ + κ δ / β) / (r β + r κ)`; the die-out condition is
    /// equivalent to `A - diag(diag_threshold) ⪯ 0`.
    pub diag_threshold: Vec<f64>,
    /// `margin < 0`. The marginal case is not die-out.
    pub die_out: bool,
    pub connected: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    /// Critical global infection scale; `+inf` when no transmission path exists.
    pub theta_c: f64,
    pub unbounded: bool,
    pub lambda1_ha: f64,
    pub connected: bool,
}

fn lb(params: &SaisParams, i: usize) -> f64 {
    // L_i B_i = r_i (κ̄_i + 1) β_i
    params.r[i] * (params.kappa[i] + params.beta[i])
}

fn md(params: &SaisParams, i: usize) -> f64 {
    (params.kappa_bar(i) + params.r[i]) * params.delta[i]
}

/// Dense `L B A - M D` with `L = diag(r_i κ̄_i + r_i)`, `M = diag(κ̄_i + r_i)`,
/// `B = diag(β_i)`, `D = diag(δ_i)`. Not symmetric in general.
pub fn build_stability_matrix(g: &Graph, params: &SaisParams) -> Result<DMatrix<f64>> {
    params.check_graph(g)?;
    let n = g.node_count();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        let row = lb(params, i);
        for &j in g.neighbors(i) {
            m[(i, j)] = row;
        }
        m[(i, i)] = -md(params, i);
    }
    Ok(m)
}

/// `(LB)^{1/2} A (LB)^{1/2} - M D`, similar to the stability matrix.
pub fn symmetric_stability_operator<'a>(g: &'a Graph, params: &SaisParams) -> Result<ScaledAdjacency<'a>> {
    params.check_graph(g)?;
    let n = g.node_count();
    Ok(ScaledAdjacency {
        graph: g,
        scale: (0..n).map(|i| lb(params, i).sqrt()).collect(),
        shift: (0..n).map(|i| -md(params, i)).collect(),
    })
}

/// `y_i = (r_i δ_i + κ_i δ_i / β_i) / (r_i β_i + r_i κ_i)`.
pub fn lemma_diagonal(params: &SaisParams) -> Vec<f64> {
    (0..params.len())
        .map(|i| {
            let (b, d, k, r) = (params.beta[i], params.delta[i], params.kappa[i], params.r[i]);
            // factored so that κ = 0 gives δ / β exactly
            (d / b) * ((r * b + k) / (r * (b + k)))
        })
        .collect()
}

pub fn spectral_margin(g: &Graph, params: &SaisParams, opts: &EigenOptions) -> Result<StabilityReport> {
    let op = symmetric_stability_operator(g, params)?;
    let connected = g.is_connected();
    if !connected {
        warn!("contact graph is disconnected; the die-out test still applies per component");
    }
    let report = largest_eigenvalue(&op, opts)?;
    let noise = opts.tol * crate::eigen::SymmetricOperator::norm_bound(&op).max(1.0);
    let margin = if report.lambda1.abs() <= noise {
        0.0
    } else {
        report.lambda1
    };
    Ok(StabilityReport {
        margin,
        diag_threshold: lemma_diagonal(params),
        die_out: margin < 0.0,
        connected,
    })
}

/// Scales infection and alerting rates by `theta`, keeping `κ̄ = κ / β` fixed.
pub fn scale_infection(params: &SaisParams, theta: f64) -> Result<SaisParams> {
    SaisParams::new(
        params.beta.iter().map(|b| theta * b).collect(),
        params.delta.clone(),
        params.kappa.iter().map(|k| theta * k).collect(),
        params.r.clone(),
    )
}

/// Critical scale `θc = 1 / λ1(H A)` for `β = θ β̄` with `β̄ = params.beta`,
/// where `H = diag((β̄_i / δ_i) r_i (κ̄_i + 1) / (κ̄_i + r_i))`.
pub fn epidemic_threshold(g: &Graph, params: &SaisParams, opts: &EigenOptions) -> Result<ThresholdReport> {
    params.check_graph(g)?;
    let n = g.node_count();
    if n == 0 {
        return Err(Error::InvalidParameter("threshold of an empty graph".into()));
    }
    let connected = g.is_connected();
    if !connected {
        warn!("contact graph is disconnected; θc is set by the most vulnerable component");
    }
    let h: Vec<f64> = (0..n)
        .map(|i| {
            let kb = params.kappa_bar(i);
            let r = params.r[i];
            params.beta[i] / params.delta[i] * r * (kb + 1.0) / (kb + r)
        })
        .collect();
    if g.edge_count() == 0 {
        return Ok(ThresholdReport {
            theta_c: f64::INFINITY,
            unbounded: true,
            lambda1_ha: 0.0,
            connected,
        });
    }
    // H A is similar to H^{1/2} A H^{1/2}
    let op = ScaledAdjacency {
        graph: g,
        scale: h.iter().map(|x| x.sqrt()).collect(),
        shift: vec![0.0; n],
    };
    let lambda = largest_eigenvalue(&op, opts)?.lambda1;
    if lambda <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "λ1(HA) = {lambda} is not positive on a graph with edges"
        )));
    }
    Ok(ThresholdReport {
        theta_c: 1.0 / lambda,
        unbounded: false,
        lambda1_ha: lambda,
        connected,
    })
}
