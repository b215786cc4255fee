//! Cost-optimal awareness allocation.
//!
//! Minimizes `Σ f_i(κ_i)` subject to the die-out condition
//! `λ1(A - diag(y(κ))) ≤ -ε` and `κ_lower ≤ κ ≤ κ_upper`. With
//! linear-fractional costs the homogenizing change of variables turns this
//! into a linear objective over a linear matrix inequality, solved here by a
//! log-barrier method or by cutting planes.

mod barrier;
mod cost;
mod cutting_plane;
mod lp;
mod oracle;
mod sdp;
mod transform;

pub use cost::{eval_cost, CostModel, NodeCost};
pub use lp::{DualSimplex, LpSolution};
pub use oracle::{oracle_grid_solve, ORACLE_MAX_NODES};
pub use sdp::{assemble_sdp, ReducedForm, SdpInstance};
pub use transform::{recover_kappa, NodeRates};

use std::fmt;
use std::str::FromStr;

use log::debug;
use serde::{Deserialize, Serialize};

use crate::eigen::{largest_eigenvalue, EigenOptions, ScaledAdjacency};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::sais::{spectral_margin, SaisParams};

/// `(c, s)` with `f(κ_lower) = 0` and `f(κ_upper) = c_bar`.
pub fn fit_cost_params(c_bar: f64, kappa_lower: f64, kappa_upper: f64, r: f64, beta: f64) -> Result<(f64, f64)> {
    let cost = NodeCost::fit(c_bar, kappa_lower, kappa_upper, r, beta)?;
    Ok((cost.c, cost.s))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AllocationStatus {
    /// Certified margin strictly below `-tol`.
    Optimal,
    /// Certified margin within `tol` of zero: the optimum sits on the
    /// stability boundary, which is not strict die-out.
    Marginal,
    Infeasible,
}

impl fmt::Display for AllocationStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AllocationStatus::Optimal => "optimal",
            AllocationStatus::Marginal => "marginal",
            AllocationStatus::Infeasible => "infeasible",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverMethod {
    InteriorPoint,
    CuttingPlane,
    /// Grid search; only produced by [`oracle_grid_solve`].
    Oracle,
}

impl FromStr for SolverMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "interior_point" | "barrier" => Ok(SolverMethod::InteriorPoint),
            "cutting_plane" | "cuts" => Ok(SolverMethod::CuttingPlane),
            other => Err(Error::InvalidParameter(format!("unknown solver method '{other}'"))),
        }
    }
}

/// Which variables the solver works in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Formulation {
    /// `w` eliminated through the normalization rows.
    Reduced,
    /// Both `u` and `w`, with normalization, box and positivity rows.
    Full,
}

impl FromStr for Formulation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "reduced" => Ok(Formulation::Reduced),
            "full" => Ok(Formulation::Full),
            other => Err(Error::InvalidParameter(format!("unknown formulation '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    pub method: SolverMethod,
    pub formulation: Formulation,
    /// Feasibility tolerance on `λ1` and on the certified margin.
    pub tol: f64,
    /// Barrier duality-gap target, in cost units.
    pub gap_tol: f64,
    /// Newton steps (barrier) or cut rounds (cutting plane).
    pub max_iterations: usize,
    pub cuts_per_round: usize,
    /// Requires `λ1(A - diag(y)) ≤ -epsilon_backoff` instead of `≤ 0`.
    pub epsilon_backoff: f64,
    pub record_trace: bool,
    pub eigen: EigenOptions,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            method: SolverMethod::InteriorPoint,
            formulation: Formulation::Reduced,
            tol: 1e-7,
            gap_tol: 1e-9,
            max_iterations: 500,
            cuts_per_round: 3,
            epsilon_backoff: 0.0,
            record_trace: true,
            eigen: EigenOptions::default(),
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || !(self.gap_tol > 0.0) {
            return Err(Error::InvalidParameter("solver tolerances must be positive".into()));
        }
        if !(self.epsilon_backoff >= 0.0 && self.epsilon_backoff.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "epsilon backoff {} must be nonnegative",
                self.epsilon_backoff
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidParameter("max_iterations must be positive".into()));
        }
        if self.method == SolverMethod::Oracle {
            return Err(Error::InvalidParameter(
                "the grid oracle is run through oracle_grid_solve".into(),
            ));
        }
        Ok(())
    }
}

/// One solver iterate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub iteration: usize,
    pub objective: f64,
    /// `max_i |r_i β_i w_i + r_i u_i - 1|` at the iterate.
    pub normalization_residual: f64,
    /// `λ1(A + ε I - diag(D))`, recorded by the cutting-plane loop.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_eigenvalue: Option<f64>,
    /// Barrier weight `t`, recorded by the interior-point method.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub barrier_weight: Option<f64>,
}

/// Why no allocation meets the die-out condition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InfeasibilityReport {
    /// `λ1(A + ε I - diag(y(κ_upper)))`; positive when infeasible.
    pub lambda_at_upper: f64,
    /// Attainable diagonal per node: `y(κ_lower)` to `y(κ_upper)`.
    pub y_lower: Vec<f64>,
    pub y_upper: Vec<f64>,
}

impl InfeasibilityReport {
    pub(crate) fn at_upper(instance: &SdpInstance, epsilon: f64) -> Result<Self> {
        let n = instance.node_count();
        let y_lower: Vec<f64> = (0..n)
            .map(|i| instance.rates(i).y_from_kappa(instance.cost.nodes[i].kappa_lower))
            .collect();
        let y_upper: Vec<f64> = (0..n)
            .map(|i| instance.rates(i).y_from_kappa(instance.cost.nodes[i].kappa_upper))
            .collect();
        let lambda_at_upper = lemma_lambda(&instance.graph, &y_upper, epsilon, &EigenOptions::default())?;
        Ok(Self {
            lambda_at_upper,
            y_lower,
            y_upper,
        })
    }
}

impl fmt::Display for InfeasibilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "even kappa = kappa_upper leaves lambda1(A - diag(y)) = {:.6e} > 0",
            self.lambda_at_upper
        )?;
        let lo = self.y_lower.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self.y_upper.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        write!(f, "attainable per-node thresholds y span [{lo:.6}, {hi:.6}]")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AllocationResult {
    pub kappa_star: Vec<f64>,
    pub u_star: Vec<f64>,
    pub w_star: Vec<f64>,
    pub y_star: Vec<f64>,
    /// `f_i(κ*_i)` per node.
    pub investment: Vec<f64>,
    /// `Σ f_i(κ*_i)`.
    pub total_cost: f64,
    /// `Σ c_i w*_i + s_i u*_i`; equals `total_cost` up to rounding.
    pub linear_cost: f64,
    /// Certified `λ1(L B A - M D)` at `κ*`.
    pub margin: f64,
    /// `λ1(A - diag(y*))`.
    pub lemma_margin: f64,
    pub status: AllocationStatus,
    pub method: SolverMethod,
    pub formulation: Formulation,
    pub iterations: usize,
    pub epsilon_backoff: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<TraceEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub infeasibility: Option<InfeasibilityReport>,
}

impl AllocationResult {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// `node,degree,kappa_star,investment`, one row per node.
    pub fn to_scatter_csv(&self, g: &Graph) -> Result<String> {
        if g.node_count() != self.kappa_star.len() {
            return Err(Error::DimensionMismatch {
                what: "allocation vs graph",
                expected: g.node_count(),
                got: self.kappa_star.len(),
            });
        }
        let mut out = String::from("node,degree,kappa_star,investment\n");
        for (i, (k, f)) in self.kappa_star.iter().zip(&self.investment).enumerate() {
            out.push_str(&format!("{i},{},{k},{f}\n", g.degree(i)));
        }
        Ok(out)
    }
}

/// Independent check of an allocation: the spectral margin of the full
/// stability matrix at the given rates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub margin: f64,
    pub passed: bool,
}

pub fn certify(g: &Graph, params: &SaisParams, tol: f64) -> Result<Certificate> {
    let report = spectral_margin(g, params, &EigenOptions::default())?;
    Ok(Certificate {
        margin: report.margin,
        passed: report.margin <= tol,
    })
}

/// `λ1(A + ε I - diag(y))` over the whole graph.
fn lemma_lambda(g: &Graph, y: &[f64], epsilon: f64, opts: &EigenOptions) -> Result<f64> {
    if g.node_count() == 0 {
        return Ok(f64::NEG_INFINITY);
    }
    let op = ScaledAdjacency {
        graph: g,
        scale: vec![1.0; g.node_count()],
        shift: y.iter().map(|y| epsilon - y).collect(),
    };
    Ok(largest_eigenvalue(&op, opts)?.lambda1)
}

fn active_lambda(instance: &SdpInstance, d: &[f64], epsilon: f64, opts: &EigenOptions) -> Result<f64> {
    let m = instance.lemma_matrix(d, epsilon);
    Ok(largest_eigenvalue(&m, opts)?.lambda1)
}

/// Builds the result from a point given over all nodes and certifies it.
#[allow(clippy::too_many_arguments)]
pub(crate) fn finish(
    instance: &SdpInstance,
    options: &SolverOptions,
    u: Vec<f64>,
    w: Vec<f64>,
    method: SolverMethod,
    formulation: Formulation,
    iterations: usize,
    trace: Vec<TraceEntry>,
    infeasibility: Option<InfeasibilityReport>,
) -> Result<AllocationResult> {
    let n = instance.node_count();
    let mut kappa = Vec::with_capacity(n);
    for i in 0..n {
        let c = &instance.cost.nodes[i];
        let mut k = recover_kappa(u[i], w[i])?.clamp(c.kappa_lower, c.kappa_upper);
        // undo division round-off at the bounds
        for bound in [c.kappa_lower, c.kappa_upper] {
            if (k - bound).abs() <= 1e-12 * bound.abs().max(1.0) {
                k = bound;
            }
        }
        kappa.push(k);
    }
    let y_star: Vec<f64> = (0..n).map(|i| instance.rates(i).y_from_kappa(kappa[i])).collect();
    let investment: Vec<f64> = (0..n)
        .map(|i| instance.cost.nodes[i].eval(kappa[i]))
        .collect::<Result<_>>()?;
    let total_cost = investment.iter().sum();
    let linear_cost = instance.objective(&u, &w);
    let params = instance.params.with_kappa(kappa.clone())?;
    let margin = if n == 0 {
        f64::NEG_INFINITY
    } else {
        certify(&instance.graph, &params, options.tol)?.margin
    };
    let lemma_margin = lemma_lambda(&instance.graph, &y_star, 0.0, &options.eigen)?;
    let status = if infeasibility.is_some() {
        AllocationStatus::Infeasible
    } else if margin < -options.tol {
        AllocationStatus::Optimal
    } else if margin <= options.tol {
        AllocationStatus::Marginal
    } else {
        AllocationStatus::Infeasible
    };
    Ok(AllocationResult {
        kappa_star: kappa,
        u_star: u,
        w_star: w,
        y_star,
        investment,
        total_cost,
        linear_cost,
        margin,
        lemma_margin,
        status,
        method,
        formulation,
        iterations,
        epsilon_backoff: options.epsilon_backoff,
        trace,
        infeasibility,
    })
}

/// Per-node point with every node at the given rate.
fn point_at(instance: &SdpInstance, kappa: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut u = Vec::with_capacity(kappa.len());
    let mut w = Vec::with_capacity(kappa.len());
    for (i, &k) in kappa.iter().enumerate() {
        let (ui, wi) = instance.rates(i).charnes_cooper(k)?;
        u.push(ui);
        w.push(wi);
    }
    Ok((u, w))
}

struct Workspace<'a> {
    instance: &'a SdpInstance,
    options: &'a SolverOptions,
    trace: Vec<TraceEntry>,
}

impl Workspace<'_> {
    /// Full per-node `(u, w)` from values on the active nodes; isolated
    /// nodes stay at `κ_lower`.
    fn expand(&self, active_u: &[f64], active_w: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let (mut u, mut w) = point_at(self.instance, &self.instance.cost.kappa_lower())?;
        for (k, &i) in self.instance.active.iter().enumerate() {
            u[i] = active_u[k];
            w[i] = active_w[k];
        }
        Ok((u, w))
    }

    fn record(
        &mut self,
        iteration: usize,
        active_u: &[f64],
        active_w: &[f64],
        lambda: Option<f64>,
        weight: Option<f64>,
    ) {
        if !self.options.record_trace {
            return;
        }
        let Ok((u, w)) = self.expand(active_u, active_w) else {
            return;
        };
        let normalization_residual = (0..u.len())
            .map(|i| (self.instance.rates(i).normalization(u[i], w[i]) - 1.0).abs())
            .fold(0.0, f64::max);
        self.trace.push(TraceEntry {
            iteration,
            objective: self.instance.objective(&u, &w),
            normalization_residual,
            max_eigenvalue: lambda,
            barrier_weight: weight,
        });
    }

    fn reduced_d(&self, active_u: &[f64]) -> Vec<f64> {
        let red = &self.instance.reduced;
        self.instance
            .active
            .iter()
            .zip(active_u)
            .map(|(&i, u)| red.d0[i] + red.d1[i] * u)
            .collect()
    }

    fn w_of(&self, active_u: &[f64]) -> Vec<f64> {
        self.instance
            .active
            .iter()
            .zip(active_u)
            .map(|(&i, &u)| self.instance.rates(i).w_from_u(u))
            .collect()
    }
}

/// Solves the allocation program.
///
/// Before any iteration the endpoints are checked directly: if even
/// `κ_upper` everywhere violates the condition the result is `Infeasible`
/// with an [`InfeasibilityReport`]; if `κ_lower` already satisfies it, that
/// is optimal because every cost is nondecreasing.
pub fn solve_allocation(instance: &SdpInstance, options: &SolverOptions) -> Result<AllocationResult> {
    options.validate()?;
    let eps = options.epsilon_backoff;
    let mut ws = Workspace {
        instance,
        options,
        trace: Vec::new(),
    };
    let kappa_lower = instance.cost.kappa_lower();
    let kappa_upper = instance.cost.kappa_upper();
    let done = |u, w, iterations, trace, infeasible| {
        finish(
            instance,
            options,
            u,
            w,
            options.method,
            options.formulation,
            iterations,
            trace,
            infeasible,
        )
    };
    if instance.active.is_empty() {
        let (u, w) = point_at(instance, &kappa_lower)?;
        return done(u, w, 0, Vec::new(), None);
    }
    let red = &instance.reduced;
    let u_lo: Vec<f64> = instance.active.iter().map(|&i| red.u_lower[i]).collect();
    let u_hi: Vec<f64> = instance.active.iter().map(|&i| red.u_upper[i]).collect();
    let lambda_hi = active_lambda(instance, &ws.reduced_d(&u_hi), eps, &options.eigen)?;
    if lambda_hi > options.tol {
        let (u, w) = point_at(instance, &kappa_upper)?;
        let report = InfeasibilityReport::at_upper(instance, eps)?;
        return done(u, w, 0, Vec::new(), Some(report));
    }
    let lambda_lo = active_lambda(instance, &ws.reduced_d(&u_lo), eps, &options.eigen)?;
    if lambda_lo <= 0.0 {
        let (u, w) = point_at(instance, &kappa_lower)?;
        return done(u, w, 0, Vec::new(), None);
    }
    if lambda_hi >= -options.tol {
        // only the upper corner is (barely) feasible
        let (u, w) = point_at(instance, &kappa_upper)?;
        return done(u, w, 0, Vec::new(), None);
    }

    let (active_u, active_w, iterations, converged) = match options.method {
        SolverMethod::InteriorPoint => run_barrier(&mut ws, &u_lo, &u_hi, -lambda_hi)?,
        SolverMethod::CuttingPlane => run_cutting_plane(&mut ws, &u_lo, &u_hi)?,
        SolverMethod::Oracle => unreachable!("rejected by validate"),
    };
    let (active_u, active_w) = restore(&ws, active_u, active_w, &u_hi)?;
    let (u, w) = ws.expand(&active_u, &active_w)?;
    let trace = std::mem::take(&mut ws.trace);
    let result = done(u, w, iterations, trace, None)?;
    if !converged {
        return Err(Error::SolverIterationCap {
            iterations,
            margin: result.margin,
            best: Box::new(result),
        });
    }
    Ok(result)
}

fn run_barrier(
    ws: &mut Workspace<'_>,
    u_lo: &[f64],
    u_hi: &[f64],
    margin_hi: f64,
) -> Result<(Vec<f64>, Vec<f64>, usize, bool)> {
    let instance = ws.instance;
    let options = ws.options;
    let red = &instance.reduced;
    let active = &instance.active;
    // stepping each u down by at most margin / (2 d1) keeps S ⪰ margin / 2
    let u0: Vec<f64> = active
        .iter()
        .enumerate()
        .map(|(k, &i)| {
            let step = (0.5 * (u_hi[k] - u_lo[k])).min(0.5 * margin_hi / red.d1[i]);
            u_hi[k] - step
        })
        .collect();
    let settings = barrier::BarrierSettings {
        gap_tol: options.gap_tol,
        max_newton: options.max_iterations,
    };
    match options.formulation {
        Formulation::Reduced => {
            let mut terms = Vec::with_capacity(2 * active.len());
            for k in 0..active.len() {
                terms.push(barrier::Term {
                    node: k,
                    a0: -u_lo[k],
                    a1: 1.0,
                });
                terms.push(barrier::Term {
                    node: k,
                    a0: u_hi[k],
                    a1: -1.0,
                });
            }
            let problem = barrier::BarrierProblem {
                adjacency: instance.active_adjacency(),
                epsilon: options.epsilon_backoff,
                d0: active.iter().map(|&i| red.d0[i]).collect(),
                d1: active.iter().map(|&i| red.d1[i]).collect(),
                slope: active.iter().map(|&i| red.slope[i]).collect(),
                terms,
                x_lower: u_lo.to_vec(),
            };
            let outcome = barrier::minimize(&problem, u0, settings, |step, x, t| {
                let w = ws.w_of(x);
                ws.record(step, x, &w, None, Some(t));
            })?;
            debug!("barrier: {} Newton steps, gap {:e}", outcome.newton_steps, outcome.gap);
            let w = ws.w_of(&outcome.x);
            Ok((outcome.x, w, outcome.newton_steps, outcome.converged))
        }
        Formulation::Full => {
            // u = u_b + β z, w = w_b - z keeps r β w + r u = 1 for every z
            let mut base = Vec::with_capacity(active.len());
            for &i in active {
                base.push(instance.rates(i).charnes_cooper(instance.cost.nodes[i].kappa_lower)?);
            }
            let mut terms = Vec::with_capacity(3 * active.len());
            let mut d0 = Vec::with_capacity(active.len());
            let mut d1 = Vec::with_capacity(active.len());
            let mut slope = Vec::with_capacity(active.len());
            let mut z0 = Vec::with_capacity(active.len());
            for (k, &i) in active.iter().enumerate() {
                let (ub, wb) = base[k];
                let c = &instance.cost.nodes[i];
                let beta = c.beta;
                terms.push(barrier::Term {
                    node: k,
                    a0: ub - c.kappa_lower * wb,
                    a1: beta + c.kappa_lower,
                });
                terms.push(barrier::Term {
                    node: k,
                    a0: c.kappa_upper * wb - ub,
                    a1: -(c.kappa_upper + beta),
                });
                terms.push(barrier::Term {
                    node: k,
                    a0: wb,
                    a1: -1.0,
                });
                d0.push(instance.diagonal(i, ub, wb));
                d1.push(instance.g_diag[i] * beta - instance.f_diag[i]);
                slope.push(c.s * beta - c.c);
                z0.push((u0[k] - ub) / beta);
            }
            let to_uw = |z: &[f64]| -> (Vec<f64>, Vec<f64>) {
                z.iter()
                    .zip(&base)
                    .zip(active)
                    .map(|((&z, &(ub, wb)), &i)| (ub + instance.params.beta[i] * z, wb - z))
                    .unzip()
            };
            let problem = barrier::BarrierProblem {
                adjacency: instance.active_adjacency(),
                epsilon: options.epsilon_backoff,
                d0,
                d1,
                slope,
                terms,
                x_lower: vec![0.0; active.len()],
            };
            let outcome = barrier::minimize(&problem, z0, settings, |step, z, t| {
                let (u, w) = to_uw(z);
                ws.record(step, &u, &w, None, Some(t));
            })?;
            debug!("barrier: {} Newton steps, gap {:e}", outcome.newton_steps, outcome.gap);
            let (u, w) = to_uw(&outcome.x);
            Ok((u, w, outcome.newton_steps, outcome.converged))
        }
    }
}

fn run_cutting_plane(ws: &mut Workspace<'_>, u_lo: &[f64], u_hi: &[f64]) -> Result<(Vec<f64>, Vec<f64>, usize, bool)> {
    let instance = ws.instance;
    let options = ws.options;
    let red = &instance.reduced;
    let active = &instance.active;
    let m = active.len();
    match options.formulation {
        Formulation::Reduced => {
            let problem = cutting_plane::CutProblem {
                adjacency: instance.active_adjacency(),
                epsilon: options.epsilon_backoff,
                cost: active.iter().map(|&i| red.slope[i]).collect(),
                lower: u_lo.to_vec(),
                upper: u_hi.to_vec(),
                d_const: active.iter().map(|&i| red.d0[i]).collect(),
                d_terms: active.iter().enumerate().map(|(k, &i)| vec![(k, red.d1[i])]).collect(),
                rows: Vec::new(),
            };
            let outcome = cutting_plane::solve(
                &problem,
                options.tol,
                options.max_iterations,
                options.cuts_per_round,
                |_| {},
                |round, x, lambda| {
                    let w = ws.w_of(x);
                    ws.record(round, x, &w, Some(lambda), None);
                },
            )?;
            debug!(
                "cutting plane: {} rounds, {} cuts, lambda {:e}",
                outcome.rounds, outcome.cuts, outcome.lambda
            );
            let w = ws.w_of(&outcome.x);
            Ok((outcome.x, w, outcome.rounds, outcome.converged))
        }
        Formulation::Full => {
            // variables: u_k at 2k, w_k at 2k + 1
            let mut cost = vec![0.0; 2 * m];
            let mut lower = vec![0.0; 2 * m];
            let mut upper = vec![0.0; 2 * m];
            let mut d_terms = Vec::with_capacity(m);
            let mut rows = Vec::with_capacity(3 * m);
            for (k, &i) in active.iter().enumerate() {
                let c = &instance.cost.nodes[i];
                let rates = instance.rates(i);
                cost[2 * k] = c.s;
                cost[2 * k + 1] = c.c;
                lower[2 * k] = u_lo[k];
                upper[2 * k] = u_hi[k];
                lower[2 * k + 1] = rates.charnes_cooper(c.kappa_upper)?.1;
                upper[2 * k + 1] = rates.charnes_cooper(c.kappa_lower)?.1;
                d_terms.push(vec![(2 * k, instance.g_diag[i]), (2 * k + 1, instance.f_diag[i])]);
                let mut normalization = vec![0.0; 2 * m];
                normalization[2 * k] = rates.r;
                normalization[2 * k + 1] = rates.r * rates.beta;
                rows.push((normalization, 1.0, 1.0));
                let mut above = vec![0.0; 2 * m];
                above[2 * k] = 1.0;
                above[2 * k + 1] = -c.kappa_lower;
                rows.push((above, 0.0, f64::INFINITY));
                let mut below = vec![0.0; 2 * m];
                below[2 * k] = -1.0;
                below[2 * k + 1] = c.kappa_upper;
                rows.push((below, 0.0, f64::INFINITY));
            }
            let problem = cutting_plane::CutProblem {
                adjacency: instance.active_adjacency(),
                epsilon: options.epsilon_backoff,
                cost,
                lower,
                upper,
                d_const: vec![0.0; m],
                d_terms,
                rows,
            };
            let rates: Vec<NodeRates> = active.iter().map(|&i| instance.rates(i)).collect();
            // rescaling a (u, w) pair leaves κ = u / w unchanged, so LP
            // round-off in the normalization rows is removed exactly
            let project = |x: &mut [f64]| {
                for (k, rates) in rates.iter().enumerate() {
                    let scale = rates.normalization(x[2 * k], x[2 * k + 1]);
                    if scale > 0.0 {
                        x[2 * k] /= scale;
                        x[2 * k + 1] /= scale;
                    }
                }
            };
            let split = |x: &[f64]| -> (Vec<f64>, Vec<f64>) { (0..m).map(|k| (x[2 * k], x[2 * k + 1])).unzip() };
            let outcome = cutting_plane::solve(
                &problem,
                options.tol,
                options.max_iterations,
                options.cuts_per_round,
                project,
                |round, x, lambda| {
                    let (u, w) = split(x);
                    ws.record(round, &u, &w, Some(lambda), None);
                },
            )?;
            debug!(
                "cutting plane: {} rounds, {} cuts, lambda {:e}",
                outcome.rounds, outcome.cuts, outcome.lambda
            );
            let (u, w) = split(&outcome.x);
            Ok((u, w, outcome.rounds, outcome.converged))
        }
    }
}

/// Moves an outer-approximation point that still violates the condition
/// toward `κ_upper` until it satisfies it, by bisection on the segment.
fn restore(ws: &Workspace<'_>, u: Vec<f64>, w: Vec<f64>, u_hi: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let instance = ws.instance;
    let options = ws.options;
    let d: Vec<f64> = instance
        .active
        .iter()
        .enumerate()
        .map(|(k, &i)| instance.diagonal(i, u[k], w[k]))
        .collect();
    if active_lambda(instance, &d, options.epsilon_backoff, &options.eigen)? <= 0.0 {
        return Ok((u, w));
    }
    let base: Vec<f64> = instance
        .active
        .iter()
        .enumerate()
        .map(|(k, &i)| {
            let rates = instance.rates(i);
            let kappa = recover_kappa(u[k], w[k])?;
            Ok(rates.u_from_kappa(kappa))
        })
        .collect::<Result<_>>()?;
    let along = |theta: f64| -> Vec<f64> { base.iter().zip(u_hi).map(|(b, h)| b + theta * (h - b)).collect() };
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if active_lambda(
            instance,
            &ws.reduced_d(&along(mid)),
            options.epsilon_backoff,
            &options.eigen,
        )? <= 0.0
        {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let u = along(hi);
    let w = ws.w_of(&u);
    Ok((u, w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphKind;
    use approx::assert_abs_diff_eq;

    fn unit_k3(r: f64) -> SdpInstance {
        let g = Graph::generate(GraphKind::Complete, 3, 0).unwrap();
        let params = SaisParams::homogeneous(3, 1.0, 1.0, 0.0, r).unwrap();
        let cost = CostModel::fit(&params, &[1.0], &[0.0], &[1.0]).unwrap();
        assemble_sdp(&g, &params, &cost).unwrap()
    }

    fn all_solvers() -> Vec<SolverOptions> {
        let mut out = Vec::new();
        for method in [SolverMethod::InteriorPoint, SolverMethod::CuttingPlane] {
            for formulation in [Formulation::Reduced, Formulation::Full] {
                out.push(SolverOptions {
                    method,
                    formulation,
                    ..SolverOptions::default()
                });
            }
        }
        out
    }

    #[test]
    fn fitted_parameters() {
        let (c, s) = fit_cost_params(1.0, 0.0, 1.0, 0.25, 1.0).unwrap();
        assert_eq!(c, 0.0);
        assert_eq!(s, 0.5);
    }

    #[test]
    fn canonical_triangle() {
        let inst = unit_k3(0.25);
        for options in all_solvers() {
            let res = solve_allocation(&inst, &options).unwrap();
            // the cost is flat along Σ y = 6, so the cut loop pins the
            // objective much more tightly than the point
            let point_tol = match options.method {
                SolverMethod::CuttingPlane => 1e-3,
                _ => 1e-6,
            };
            for k in &res.kappa_star {
                assert!((k - 0.5).abs() <= point_tol, "{options:?}: {k}");
            }
            for y in &res.y_star {
                assert!((y - 2.0).abs() <= 2.0 * point_tol, "{options:?}: {y}");
            }
            // f(0.5) = 2 * 0.5 / 1.5
            assert_abs_diff_eq!(res.total_cost, 2.0, epsilon = 1e-6);
            assert_abs_diff_eq!(res.total_cost, res.linear_cost, epsilon = 1e-9);
            assert_eq!(res.status, AllocationStatus::Marginal, "{options:?}");
            assert!(res.margin.abs() <= 1e-6);
            assert!(!res.trace.is_empty());
        }
    }

    #[test]
    fn triangle_out_of_reach() {
        let inst = unit_k3(0.5);
        for options in all_solvers() {
            let res = solve_allocation(&inst, &options).unwrap();
            assert_eq!(res.status, AllocationStatus::Infeasible);
            let report = res.infeasibility.as_ref().unwrap();
            // y(1) = 1.5 so λ1 = 2 - 1.5
            assert_abs_diff_eq!(report.lambda_at_upper, 0.5, epsilon = 1e-9);
            assert_abs_diff_eq!(report.y_upper[0], 1.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn empty_graph_stays_at_lower_bound() {
        let params = SaisParams::homogeneous(5, 0.3, 0.2, 0.0, 0.5).unwrap();
        let cost = CostModel::fit(&params, &[1.0], &[0.01], &[0.5]).unwrap();
        let inst = assemble_sdp(&Graph::empty(5), &params, &cost).unwrap();
        let res = solve_allocation(&inst, &SolverOptions::default()).unwrap();
        assert_eq!(res.kappa_star, vec![0.01; 5]);
        assert!(res.total_cost.abs() < 1e-12);
        assert_eq!(res.status, AllocationStatus::Optimal);
    }

    #[test]
    fn backoff_gives_strict_die_out() {
        let inst = unit_k3(0.25);
        let options = SolverOptions {
            epsilon_backoff: 1e-3,
            ..SolverOptions::default()
        };
        let res = solve_allocation(&inst, &options).unwrap();
        assert_eq!(res.status, AllocationStatus::Optimal);
        assert!(res.margin < -1e-5);
        assert!(res.lemma_margin <= -1e-3 + 1e-7);
        assert!(res.kappa_star.iter().all(|&k| k > 0.5));
    }

    #[test]
    fn json_round_trip_and_csv() {
        let inst = unit_k3(0.25);
        let res = solve_allocation(&inst, &SolverOptions::default()).unwrap();
        let back = AllocationResult::from_json(&res.to_json().unwrap()).unwrap();
        assert_eq!(back, res);
        let csv = res.to_scatter_csv(&inst.graph).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "node,degree,kappa_star,investment");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("0,2,"));
    }

    #[test]
    fn certify_super_threshold_lower_bound() {
        let g = Graph::generate(GraphKind::Complete, 3, 0).unwrap();
        let params = SaisParams::homogeneous(3, 1.0, 1.0, 0.0, 0.25).unwrap();
        let cert = certify(&g, &params, 1e-7).unwrap();
        assert!(cert.margin > 0.0);
        assert!(!cert.passed);
    }

    #[test]
    fn oracle_triangle() {
        let inst = unit_k3(0.25);
        let res = oracle_grid_solve(&inst.graph, &inst.params, &inst.cost, 201).unwrap();
        for k in &res.kappa_star {
            assert_abs_diff_eq!(*k, 0.5, epsilon = 0.005);
        }
        let infeasible = unit_k3(0.5);
        let res = oracle_grid_solve(&infeasible.graph, &infeasible.params, &infeasible.cost, 51).unwrap();
        assert_eq!(res.status, AllocationStatus::Infeasible);
        let empty = SaisParams::homogeneous(2, 1.0, 1.0, 0.0, 0.25).unwrap();
        let cost = CostModel::fit(&empty, &[1.0], &[0.1], &[1.0]).unwrap();
        let res = oracle_grid_solve(&Graph::empty(2), &empty, &cost, 11).unwrap();
        assert_eq!(res.kappa_star, vec![0.1, 0.1]);
        let big = Graph::empty(5);
        let p5 = SaisParams::homogeneous(5, 1.0, 1.0, 0.0, 0.25).unwrap();
        let c5 = CostModel::fit(&p5, &[1.0], &[0.0], &[1.0]).unwrap();
        assert!(matches!(
            oracle_grid_solve(&big, &p5, &c5, 11),
            Err(Error::OracleTooLarge { max: 4, n: 5 })
        ));
    }
}
