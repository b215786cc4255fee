//! Linear-fractional investment cost `f(κ) = (c + s κ) / (r β + r κ)`.

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sais::SaisParams;

/// Cost curve of one node. `r` and `beta` are the node's SAIS rates, which
/// fix the denominator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeCost {
    pub c: f64,
    pub s: f64,
    pub c_bar: f64,
    pub kappa_lower: f64,
    pub kappa_upper: f64,
    pub r: f64,
    pub beta: f64,
}

const DOMAIN_SLACK: f64 = 1e-12;

impl NodeCost {
    /// Picks `(c, s)` so that `f(κ_lower) = 0` and `f(κ_upper) = c_bar`:
    /// `s = c_bar r (β + κ_upper) / (κ_upper - κ_lower)` and
    /// `c = c_bar r (β + κ_upper) - s κ_upper`.
    pub fn fit(c_bar: f64, kappa_lower: f64, kappa_upper: f64, r: f64, beta: f64) -> Result<Self> {
        if kappa_upper == kappa_lower {
            return Err(Error::DegenerateRange {
                node: 0,
                kappa: kappa_lower,
            });
        }
        if !(kappa_upper > kappa_lower) || !(kappa_lower >= 0.0) || !kappa_upper.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "awareness range [{kappa_lower}, {kappa_upper}] must satisfy 0 <= lower < upper"
            )));
        }
        if !(c_bar > 0.0 && c_bar.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "maximum cost {c_bar} must be positive"
            )));
        }
        if !(r > 0.0 && r < 1.0) || !(beta > 0.0) {
            return Err(Error::InvalidParameter(format!("invalid rates r = {r}, beta = {beta}")));
        }
        let scale = c_bar * r * (beta + kappa_upper);
        let s = scale / (kappa_upper - kappa_lower);
        let c = scale - s * kappa_upper;
        let cost = Self {
            c,
            s,
            c_bar,
            kappa_lower,
            kappa_upper,
            r,
            beta,
        };
        cost.validate()?;
        Ok(cost)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa_lower <= self.kappa_upper) || !(self.c_bar > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "cost needs kappa_lower <= kappa_upper and c_bar > 0 (got {self:?})"
            )));
        }
        if self.s * self.beta < self.c - 1e-12 * self.c.abs().max(1.0) {
            return Err(Error::InvalidParameter(format!(
                "cost is decreasing in kappa: s β = {} < c = {}",
                self.s * self.beta,
                self.c
            )));
        }
        Ok(())
    }

    /// `s > c_bar / 2`, the stricter slope condition quoted for the
    /// homogeneous experiment. Not enforced; [`validate`](Self::validate)
    /// checks the general monotonicity condition `s ≥ c_bar r` instead.
    pub fn meets_half_cap_slope(&self) -> bool {
        self.s > self.c_bar / 2.0
    }

    pub fn denominator(&self, kappa: f64) -> f64 {
        self.r * self.beta + self.r * kappa
    }

    pub fn eval(&self, kappa: f64) -> Result<f64> {
        let slack = DOMAIN_SLACK * self.kappa_upper.abs().max(1.0);
        if !(kappa >= self.kappa_lower - slack && kappa <= self.kappa_upper + slack) {
            return Err(Error::OutOfDomain {
                kappa,
                lower: self.kappa_lower,
                upper: self.kappa_upper,
            });
        }
        let denominator = self.denominator(kappa);
        if !(denominator > 0.0) {
            return Err(Error::SingularTransform { w: f64::INFINITY });
        }
        Ok((self.c + self.s * kappa) / denominator)
    }

    /// `f'(κ) = r (s β - c) / (r β + r κ)^2`, largest at `κ_lower`.
    pub fn max_slope(&self) -> f64 {
        self.r * (self.s * self.beta - self.c) / self.denominator(self.kappa_lower).powi(2)
    }

    /// Cost in the homogenized variables: `c w + s u`.
    pub fn linear(&self, u: f64, w: f64) -> f64 {
        self.c * w + self.s * u
    }
}

/// Per-node cost curves.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostModel {
    pub nodes: Vec<NodeCost>,
}

impl CostModel {
    /// Fits every node against its SAIS rates. Scalar inputs are given as
    /// length-one slices and broadcast.
    pub fn fit(params: &SaisParams, c_bar: &[f64], kappa_lower: &[f64], kappa_upper: &[f64]) -> Result<Self> {
        let n = params.len();
        let pick = |v: &[f64], i: usize, what: &'static str| -> Result<f64> {
            match v.len() {
                1 => Ok(v[0]),
                len if len == n => Ok(v[i]),
                len => Err(Error::DimensionMismatch {
                    what,
                    expected: n,
                    got: len,
                }),
            }
        };
        let mut nodes = Vec::with_capacity(n);
        for i in 0..n {
            let node = NodeCost::fit(
                pick(c_bar, i, "c_bar")?,
                pick(kappa_lower, i, "kappa_lower")?,
                pick(kappa_upper, i, "kappa_upper")?,
                params.r[i],
                params.beta[i],
            )
            .map_err(|e| match e {
                Error::DegenerateRange { kappa, .. } => Error::DegenerateRange { node: i, kappa },
                other => other,
            })?;
            nodes.push(node);
        }
        let flagged = nodes.iter().filter(|c| !c.meets_half_cap_slope()).count();
        if flagged > 0 {
            warn!("{flagged} node(s) have cost slope s <= c_bar / 2 (still nondecreasing)");
        }
        Ok(Self { nodes })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn kappa_lower(&self) -> Vec<f64> {
        self.nodes.iter().map(|c| c.kappa_lower).collect()
    }

    pub fn kappa_upper(&self) -> Vec<f64> {
        self.nodes.iter().map(|c| c.kappa_upper).collect()
    }

    pub fn total(&self, kappa: &[f64]) -> Result<f64> {
        self.nodes.iter().zip(kappa).map(|(c, &k)| c.eval(k)).sum()
    }

    /// Checks the cost denominators use the same `r`, `β` as `params`.
    pub fn check_params(&self, params: &SaisParams) -> Result<()> {
        if self.len() != params.len() {
            return Err(Error::DimensionMismatch {
                what: "cost model vs parameters",
                expected: params.len(),
                got: self.len(),
            });
        }
        for (i, c) in self.nodes.iter().enumerate() {
            c.validate()?;
            if c.r != params.r[i] || c.beta != params.beta[i] {
                return Err(Error::InvalidParameter(format!(
                    "cost of node {i} was fitted for different rates"
                )));
            }
        }
        Ok(())
    }
}

pub fn eval_cost(model: &NodeCost, kappa: f64) -> Result<f64> {
    model.eval(kappa)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn homogeneous_experiment() -> NodeCost {
        NodeCost::fit(1.0, 0.0, 0.024, 0.5, 7.4e-3).unwrap()
    }

    #[test]
    fn homogeneous_experiment_fit() {
        let cost = homogeneous_experiment();
        assert_abs_diff_eq!(cost.s, 0.5 * (0.0074 + 0.024) / 0.024, epsilon = 1e-15);
        assert_abs_diff_eq!(cost.s, 0.654_166_666_666_666_6, epsilon = 1e-12);
        assert_abs_diff_eq!(cost.c, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(cost.eval(0.024).unwrap(), 1.0, epsilon = 1e-14);
        assert_eq!(cost.eval(0.0).unwrap(), 0.0);
        assert!(cost.meets_half_cap_slope());
    }

    #[test]
    fn midpoint_value() {
        // 0.654167 * 0.012 / (0.5 * 0.0074 + 0.5 * 0.012)
        let cost = homogeneous_experiment();
        let expected = cost.s * 0.012 / (0.5 * 0.0074 + 0.5 * 0.012);
        assert_abs_diff_eq!(cost.eval(0.012).unwrap(), expected, epsilon = 1e-15);
        assert_abs_diff_eq!(cost.eval(0.012).unwrap(), 0.80928, epsilon = 5e-6);
    }

    #[test]
    fn monotone_on_grid() {
        let cost = homogeneous_experiment();
        let values: Vec<f64> = (0..100).map(|k| cost.eval(0.024 * k as f64 / 99.0).unwrap()).collect();
        assert!(values.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn domain_errors() {
        let cost = homogeneous_experiment();
        assert!(matches!(cost.eval(0.03), Err(Error::OutOfDomain { .. })));
        assert!(matches!(cost.eval(-0.001), Err(Error::OutOfDomain { .. })));
        assert!(matches!(
            NodeCost::fit(1.0, 0.1, 0.1, 0.5, 1.0),
            Err(Error::DegenerateRange { .. })
        ));
        assert!(NodeCost::fit(0.0, 0.0, 1.0, 0.5, 1.0).is_err());
        assert!(NodeCost::fit(1.0, 0.5, 0.1, 0.5, 1.0).is_err());
    }

    #[test]
    fn decreasing_cost_rejected() {
        let mut cost = homogeneous_experiment();
        cost.c = 1.0;
        assert!(cost.validate().is_err());
    }

    #[test]
    fn half_cap_flag() {
        // s = c_bar r (β + κu) / (κu - κl) = 0.1 * 1.1 / 1 = 0.11 < 0.5
        let cost = NodeCost::fit(1.0, 0.0, 1.0, 0.1, 0.1).unwrap();
        assert!(!cost.meets_half_cap_slope());
        assert!(cost.validate().is_ok());
    }

    #[test]
    fn model_broadcast_and_degenerate_node() {
        let params = SaisParams::homogeneous(3, 1.0, 1.0, 0.0, 0.25).unwrap();
        let model = CostModel::fit(&params, &[1.0], &[0.0], &[1.0]).unwrap();
        assert_eq!(model.len(), 3);
        assert_abs_diff_eq!(
            model.total(&[0.5, 0.5, 0.5]).unwrap(),
            3.0 * (2.0 / 3.0),
            epsilon = 1e-14
        );
        let err = CostModel::fit(&params, &[1.0], &[0.0, 0.2, 0.0], &[1.0, 0.2, 1.0]).unwrap_err();
        assert!(matches!(err, Error::DegenerateRange { node: 1, .. }));
        assert!(CostModel::fit(&params, &[1.0, 1.0], &[0.0], &[1.0]).is_err());
    }

    proptest! {
        #[test]
        fn fitted_endpoints(c_bar in 0.1..10.0f64, lo in 0.0..1.0f64, width in 1e-3..5.0f64,
                            r in 0.01..0.99f64, beta in 1e-3..5.0f64) {
            let cost = NodeCost::fit(c_bar, lo, lo + width, r, beta).unwrap();
            prop_assert!(cost.eval(lo).unwrap().abs() <= 1e-9 * c_bar);
            prop_assert!((cost.eval(lo + width).unwrap() - c_bar).abs() <= 1e-9 * c_bar);
            prop_assert!(cost.s >= c_bar * r * (1.0 - 1e-12));
            let grid: Vec<f64> = (0..100).map(|k| cost.eval(lo + width * k as f64 / 99.0).unwrap()).collect();
            prop_assert!(grid.windows(2).all(|w| w[1] >= w[0] - 1e-12));
        }
    }
}
