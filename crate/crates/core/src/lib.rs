//! Awareness allocation against epidemics on contact networks.
//!
//! The heterogeneous SAIS model (susceptible, alert, infected, susceptible)
//! extends SIS with an alert state whose infection rate is reduced by a
//! factor `r`. This crate provides:
//!
//! - [`graph`]: immutable contact graphs, edge-list I/O and generators;
//! - [`eigen`]: largest-eigenvalue solvers for symmetric operators;
//! - [`sais`]: model parameters, the spectral die-out test, the critical
//!   infection scale and the mean-field ODE;
//! - [`stochastic`]: exact Gillespie simulation and ensembles;
//! - [`allocation`]: the cost-optimal awareness program and its solvers.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod allocation;
pub mod eigen;
pub mod error;
pub mod graph;
pub mod sais;
pub mod stats;
pub mod stochastic;

pub use allocation::{
    assemble_sdp, certify, oracle_grid_solve, solve_allocation, AllocationResult, AllocationStatus, CostModel,
    Formulation, NodeCost, SdpInstance, SolverMethod, SolverOptions,
};
pub use eigen::{largest_eigenvalue, EigenOptions, EigenReport};
pub use error::{Error, Result};
pub use graph::{Graph, GraphKind};
pub use sais::{
    epidemic_threshold, integrate_mean_field, spectral_margin, MeanFieldConfig, SaisParams, StabilityReport,
    StateVector, ThresholdReport, Trajectory,
};
pub use stochastic::{ensemble_extinction, gillespie_run, EnsembleSummary, EventLog, NodeState};
