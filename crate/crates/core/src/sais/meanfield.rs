use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::SaisParams;
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Largest invariant violation absorbed by clamping after an RK4 step.
pub const CLAMP_TOLERANCE: f64 = 1e-9;

/// Per-node infection (`p`) and alertness (`q`) probabilities at time `t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub t: f64,
}

impl StateVector {
    pub fn new(p: Vec<f64>, q: Vec<f64>, t: f64) -> Result<Self> {
        if p.len() != q.len() {
            return Err(Error::DimensionMismatch {
                what: "q vs p",
                expected: p.len(),
                got: q.len(),
            });
        }
        for i in 0..p.len() {
            let ok = p[i] >= 0.0 && q[i] >= 0.0 && p[i] + q[i] <= 1.0;
            if !ok {
                return Err(Error::InvalidParameter(format!(
                    "state at node {i} (p = {}, q = {}) is not a probability split",
                    p[i], q[i]
                )));
            }
        }
        Ok(Self { p, q, t })
    }

    pub fn healthy(n: usize) -> Self {
        Self {
            p: vec![0.0; n],
            q: vec![0.0; n],
            t: 0.0,
        }
    }

    /// Uniform infection probability `p0`, nobody alert.
    pub fn uniform(n: usize, p0: f64) -> Result<Self> {
        Self::new(vec![p0; n], vec![0.0; n], 0.0)
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn max_p(&self) -> f64 {
        self.p.iter().copied().fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanFieldConfig {
    pub t_end: f64,
    /// Step size; `None` picks [`default_dt`].
    pub dt: Option<f64>,
    /// Record every k-th step (the final state is always recorded).
    pub record_every: usize,
}

impl MeanFieldConfig {
    pub fn new(t_end: f64) -> Self {
        Self {
            t_end,
            dt: None,
            record_every: 1,
        }
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = Some(dt);
        self
    }

    pub fn recording_every(mut self, k: usize) -> Self {
        self.record_every = k;
        self
    }
}

/// `0.01 / ρ` with `ρ = max_i (β_i d_max + δ_i + κ_i d_max)`.
pub fn default_dt(g: &Graph, params: &SaisParams) -> f64 {
    let dmax = g.max_degree() as f64;
    let rho = (0..params.len())
        .map(|i| params.beta[i] * dmax + params.delta[i] + params.kappa[i] * dmax)
        .fold(0.0, f64::max);
    0.01 / rho
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub p: Vec<Vec<f64>>,
    pub q: Vec<Vec<f64>>,
    pub dt: f64,
    /// Smallest of `p_i`, `q_i`, `1 - p_i - q_i` seen before clamping.
    pub min_slack_before_clamp: f64,
}

impl Trajectory {
    pub fn final_state(&self) -> StateVector {
        let k = self.times.len() - 1;
        StateVector {
            p: self.p[k].clone(),
            q: self.q[k].clone(),
            t: self.times[k],
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `t,p_0..p_{n-1},q_0..q_{n-1}`, one row per sample.
    pub fn to_csv(&self) -> String {
        let n = self.p.first().map_or(0, Vec::len);
        let mut out = String::from("t");
        for i in 0..n {
            let _ = write!(out, ",p_{i}");
        }
        for i in 0..n {
            let _ = write!(out, ",q_{i}");
        }
        out.push('\n');
        for k in 0..self.times.len() {
            let _ = write!(out, "{}", self.times[k]);
            for v in self.p[k].iter().chain(&self.q[k]) {
                let _ = write!(out, ",{v}");
            }
            out.push('\n');
        }
        out
    }
}

struct Field<'a> {
    g: &'a Graph,
    params: &'a SaisParams,
    pressure: Vec<f64>,
}

impl Field<'_> {
    /// Writes `(dp, dq)` at `(p, q)`.
    fn eval(&mut self, p: &[f64], q: &[f64], dp: &mut [f64], dq: &mut [f64]) {
        self.g.adjacency_apply(p, &mut self.pressure);
        let pr = self.params;
        for i in 0..p.len() {
            let s = self.pressure[i];
            let free = 1.0 - p[i] - q[i];
            let alert_infection = pr.r[i] * pr.beta[i] * q[i] * s;
            dp[i] = pr.beta[i] * free * s + alert_infection - pr.delta[i] * p[i];
            dq[i] = pr.kappa[i] * free * s - alert_infection;
        }
    }
}

/// Fixed-step RK4 integration of the mean-field SAIS equations.
pub fn integrate_mean_field(
    g: &Graph,
    params: &SaisParams,
    init: &StateVector,
    config: &MeanFieldConfig,
) -> Result<Trajectory> {
    params.check_graph(g)?;
    let n = g.node_count();
    StateVector::new(init.p.clone(), init.q.clone(), init.t)?;
    if init.len() != n {
        return Err(Error::DimensionMismatch {
            what: "initial state vs graph nodes",
            expected: n,
            got: init.len(),
        });
    }
    if !(config.t_end >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "t_end = {} must be nonnegative",
            config.t_end
        )));
    }
    let dt_max = config.dt.unwrap_or_else(|| default_dt(g, params));
    if !(dt_max > 0.0 && dt_max.is_finite()) {
        return Err(Error::InvalidParameter(format!("dt = {dt_max} must be positive")));
    }
    let record_every = config.record_every.max(1);
    let steps = (config.t_end / dt_max).ceil() as usize;
    let h = if steps == 0 {
        dt_max
    } else {
        config.t_end / steps as f64
    };

    let mut field = Field {
        g,
        params,
        pressure: vec![0.0; n],
    };
    let mut p = init.p.clone();
    let mut q = init.q.clone();
    let mut traj = Trajectory {
        times: vec![init.t],
        p: vec![p.clone()],
        q: vec![q.clone()],
        dt: h,
        min_slack_before_clamp: f64::INFINITY,
    };

    let mut k = [(); 4].map(|_| (vec![0.0; n], vec![0.0; n]));
    let mut tp = vec![0.0; n];
    let mut tq = vec![0.0; n];
    for step in 1..=steps {
        field.eval(&p, &q, &mut k[0].0, &mut k[0].1);
        for (stage, weight) in [(1usize, 0.5), (2, 0.5), (3, 1.0)] {
            let (prev, rest) = k.split_at_mut(stage);
            let (kp, kq) = &prev[stage - 1];
            for i in 0..n {
                tp[i] = p[i] + weight * h * kp[i];
                tq[i] = q[i] + weight * h * kq[i];
            }
            let (np, nq) = &mut rest[0];
            field.eval(&tp, &tq, np, nq);
        }
        for i in 0..n {
            p[i] += h / 6.0 * (k[0].0[i] + 2.0 * k[1].0[i] + 2.0 * k[2].0[i] + k[3].0[i]);
            q[i] += h / 6.0 * (k[0].1[i] + 2.0 * k[1].1[i] + 2.0 * k[2].1[i] + k[3].1[i]);
        }
        let t = init.t + step as f64 * h;

        let mut slack = f64::INFINITY;
        for i in 0..n {
            slack = slack.min(p[i]).min(q[i]).min(1.0 - p[i] - q[i]);
        }
        traj.min_slack_before_clamp = traj.min_slack_before_clamp.min(slack);
        if slack < -CLAMP_TOLERANCE || !slack.is_finite() {
            return Err(Error::IntegrationUnstable { t, violation: -slack });
        }
        if slack < 0.0 {
            for i in 0..n {
                p[i] = p[i].max(0.0);
                q[i] = q[i].max(0.0);
                let total = p[i] + q[i];
                if total > 1.0 {
                    p[i] /= total;
                    q[i] /= total;
                }
            }
        }
        if step % record_every == 0 || step == steps {
            traj.times.push(t);
            traj.p.push(p.clone());
            traj.q.push(q.clone());
        }
    }
    Ok(traj)
}

/// Per-node residual of the endemic equilibrium condition
/// `p_i / (1 - p_i) = (β_i / δ_i) r_i (κ̄_i + 1) / (κ̄_i + r_i) Σ_j a_ij p_j`.
pub fn equilibrium_residual(g: &Graph, params: &SaisParams, p_star: &[f64]) -> Result<Vec<f64>> {
    params.check_graph(g)?;
    let n = g.node_count();
    if p_star.len() != n {
        return Err(Error::DimensionMismatch {
            what: "p* vs graph nodes",
            expected: n,
            got: p_star.len(),
        });
    }
    if let Some(i) = p_star.iter().position(|&x| x >= 1.0) {
        return Err(Error::SingularEquilibrium { node: i });
    }
    if let Some(i) = p_star.iter().position(|&x| !(x >= 0.0)) {
        return Err(Error::InvalidParameter(format!("p*[{i}] = {} is negative", p_star[i])));
    }
    let mut pressure = vec![0.0; n];
    g.adjacency_apply(p_star, &mut pressure);
    Ok((0..n)
        .map(|i| {
            let kb = params.kappa_bar(i);
            let r = params.r[i];
            let gain = params.beta[i] / params.delta[i] * r * (kb + 1.0) / (kb + r);
            p_star[i] / (1.0 - p_star[i]) - gain * pressure[i]
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphKind;
    use approx::assert_abs_diff_eq;

    #[test]
    fn healthy_state_is_fixed() {
        let g = Graph::generate(GraphKind::Complete, 4, 0).unwrap();
        let p = SaisParams::homogeneous(4, 2.0, 1.0, 0.5, 0.5).unwrap();
        let traj = integrate_mean_field(&g, &p, &StateVector::healthy(4), &MeanFieldConfig::new(5.0)).unwrap();
        for (ps, qs) in traj.p.iter().zip(&traj.q) {
            assert!(ps.iter().chain(qs).all(|&x| x == 0.0));
        }
    }

    #[test]
    fn isolated_node_decays_exponentially() {
        let g = Graph::empty(1);
        let p = SaisParams::homogeneous(1, 1.0, 0.8, 0.3, 0.5).unwrap();
        let init = StateVector::uniform(1, 0.5).unwrap();
        let traj = integrate_mean_field(&g, &p, &init, &MeanFieldConfig::new(3.0).with_dt(0.01)).unwrap();
        for (t, ps) in traj.times.iter().zip(&traj.p) {
            assert_abs_diff_eq!(ps[0], 0.5 * (-0.8 * t).exp(), epsilon = 1e-9);
        }
    }

    #[test]
    fn step_count_lands_on_t_end() {
        let g = Graph::empty(2);
        let p = SaisParams::homogeneous(2, 1.0, 1.0, 0.0, 0.5).unwrap();
        let traj = integrate_mean_field(
            &g,
            &p,
            &StateVector::uniform(2, 0.1).unwrap(),
            &MeanFieldConfig::new(1.0).with_dt(0.3),
        )
        .unwrap();
        assert_eq!(traj.times.len(), 5);
        assert_abs_diff_eq!(*traj.times.last().unwrap(), 1.0, epsilon = 1e-15);
        assert!(traj.dt <= 0.3);
    }

    #[test]
    fn record_every_keeps_final_sample() {
        let g = Graph::empty(1);
        let p = SaisParams::homogeneous(1, 1.0, 1.0, 0.0, 0.5).unwrap();
        let cfg = MeanFieldConfig::new(1.0).with_dt(0.1).recording_every(3);
        let traj = integrate_mean_field(&g, &p, &StateVector::uniform(1, 0.2).unwrap(), &cfg).unwrap();
        assert_eq!(traj.times.len(), 1 + 3 + 1);
        assert_abs_diff_eq!(traj.final_state().t, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn huge_step_reports_instability() {
        let g = Graph::generate(GraphKind::Complete, 5, 0).unwrap();
        let p = SaisParams::homogeneous(5, 5.0, 1.0, 2.0, 0.5).unwrap();
        let err = integrate_mean_field(
            &g,
            &p,
            &StateVector::uniform(5, 0.5).unwrap(),
            &MeanFieldConfig::new(10.0).with_dt(2.0),
        )
        .unwrap_err();
        assert!(matches!(err, Error::IntegrationUnstable { .. }));
    }

    #[test]
    fn invalid_initial_state() {
        assert!(StateVector::new(vec![0.7], vec![0.4], 0.0).is_err());
        assert!(StateVector::new(vec![-0.1], vec![0.0], 0.0).is_err());
        assert!(StateVector::new(vec![0.1, 0.2], vec![0.0], 0.0).is_err());
    }

    #[test]
    fn csv_layout() {
        let g = Graph::empty(2);
        let p = SaisParams::homogeneous(2, 1.0, 1.0, 0.0, 0.5).unwrap();
        let traj = integrate_mean_field(
            &g,
            &p,
            &StateVector::healthy(2),
            &MeanFieldConfig::new(0.5).with_dt(0.25),
        )
        .unwrap();
        let csv = traj.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "t,p_0,p_1,q_0,q_1");
        assert_eq!(lines[1], "0,0,0,0,0");
        assert_eq!(lines.len(), 4);
        assert!(lines[3].starts_with("0.5,"));
    }

    #[test]
    fn residual_zero_at_healthy() {
        let g = Graph::generate(GraphKind::Complete, 3, 0).unwrap();
        let p = SaisParams::homogeneous(3, 1.0, 1.0, 0.5, 0.25).unwrap();
        assert!(equilibrium_residual(&g, &p, &[0.0; 3])
            .unwrap()
            .iter()
            .all(|&r| r == 0.0));
    }

    #[test]
    fn residual_nonzero_off_equilibrium() {
        let g = Graph::generate(GraphKind::Complete, 3, 0).unwrap();
        let p = SaisParams::homogeneous(3, 1.0, 1.0, 0.5, 0.25).unwrap();
        let res = equilibrium_residual(&g, &p, &[0.3, 0.1, 0.6]).unwrap();
        assert!(res.iter().any(|r| r.abs() > 1e-3));
    }

    #[test]
    fn residual_singular_at_one() {
        let g = Graph::generate(GraphKind::Complete, 2, 0).unwrap();
        let p = SaisParams::homogeneous(2, 1.0, 1.0, 0.0, 0.5).unwrap();
        assert!(matches!(
            equilibrium_residual(&g, &p, &[0.2, 1.0]),
            Err(Error::SingularEquilibrium { node: 1 })
        ));
    }
}
