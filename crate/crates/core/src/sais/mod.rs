//! Heterogeneous SAIS model: per-node rates, the spectral die-out test and
//! the mean-field dynamics.

mod meanfield;
mod stability;

pub use meanfield::{
    default_dt, equilibrium_residual, integrate_mean_field, MeanFieldConfig, StateVector, Trajectory, CLAMP_TOLERANCE,
};
pub use stability::{
    build_stability_matrix, epidemic_threshold, lemma_diagonal, scale_infection, spectral_margin,
    symmetric_stability_operator, StabilityReport, ThresholdReport,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Per-node rates of the heterogeneous SAIS model.
///
/// `beta` is the infection rate per infected neighbor, `delta` the curing
/// rate, `kappa` the alerting rate per infected neighbor, and `r` the factor
/// by which being alert reduces the infection rate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SaisParams {
    pub beta: Vec<f64>,
    pub delta: Vec<f64>,
    pub kappa: Vec<f64>,
    pub r: Vec<f64>,
}

impl SaisParams {
    pub fn new(beta: Vec<f64>, delta: Vec<f64>, kappa: Vec<f64>, r: Vec<f64>) -> Result<Self> {
        let params = Self { beta, delta, kappa, r };
        params.validate()?;
        Ok(params)
    }

    /// The same rates on every node.
    pub fn homogeneous(n: usize, beta: f64, delta: f64, kappa: f64, r: f64) -> Result<Self> {
        Self::new(vec![beta; n], vec![delta; n], vec![kappa; n], vec![r; n])
    }

    pub fn len(&self) -> usize {
        self.beta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beta.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.beta.len();
        for (what, v) in [("delta", &self.delta), ("kappa", &self.kappa), ("r", &self.r)] {
            if v.len() != n {
                return Err(Error::DimensionMismatch {
                    what,
                    expected: n,
                    got: v.len(),
                });
            }
        }
        for i in 0..n {
            let (b, d, k, r) = (self.beta[i], self.delta[i], self.kappa[i], self.r[i]);
            if !(b > 0.0 && b.is_finite()) {
                return Err(Error::InvalidParameter(format!("beta[{i}] = {b} must be positive")));
            }
            if !(d > 0.0 && d.is_finite()) {
                return Err(Error::InvalidParameter(format!("delta[{i}] = {d} must be positive")));
            }
            if !(k >= 0.0 && k.is_finite()) {
                return Err(Error::InvalidParameter(format!("kappa[{i}] = {k} must be nonnegative")));
            }
            if !(r > 0.0 && r < 1.0) {
                return Err(Error::InvalidParameter(format!("r[{i}] = {r} must lie in (0, 1)")));
            }
        }
        Ok(())
    }

    /// Validates and checks the vectors match the graph size.
    pub fn check_graph(&self, g: &Graph) -> Result<()> {
        self.validate()?;
        if self.len() != g.node_count() {
            return Err(Error::DimensionMismatch {
                what: "parameter vectors vs graph nodes",
                expected: g.node_count(),
                got: self.len(),
            });
        }
        Ok(())
    }

    /// Normalized alerting rate `kappa_i / beta_i`.
    pub fn kappa_bar(&self, i: usize) -> f64 {
        self.kappa[i] / self.beta[i]
    }

    /// Copy with the alerting rates replaced.
    pub fn with_kappa(&self, kappa: Vec<f64>) -> Result<Self> {
        Self::new(self.beta.clone(), self.delta.clone(), kappa, self.r.clone())
    }

    pub fn min_delta(&self) -> f64 {
        self.delta.iter().copied().fold(f64::INFINITY, f64::min)
    }
}
