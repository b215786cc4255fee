//! Exact continuous-time simulation of the SAIS process (direct Gillespie
//! method).
//!
//! Per-node rates, with `Y_i` the number of infected neighbors:
//!
//! | state       | transition          | rate          |
//! |-------------|---------------------|---------------|
//! | susceptible | → infected          | `β_i Y_i`     |
//! | susceptible | → alert             | `κ_i Y_i`     |
//! | alert       | → infected          | `r_i β_i Y_i` |
//! | infected    | → susceptible       | `δ_i`         |
//!
//! Alert nodes never revert to susceptible on their own. Randomness comes
//! from `ChaCha8Rng::seed_from_u64(seed)` (crate `rand_chacha`), whose stream
//! is specified independently of platform, so an `(inputs, seed)` pair always
//! replays the same event log.

use std::fmt::Write as _;

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::sais::SaisParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeState {
    Susceptible,
    Alert,
    Infected,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransitionKind {
    InfectSusceptible,
    InfectAlert,
    Alert,
    Recover,
}

impl TransitionKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TransitionKind::InfectSusceptible => "infect_susceptible",
            TransitionKind::InfectAlert => "infect_alert",
            TransitionKind::Alert => "alert",
            TransitionKind::Recover => "recover",
        }
    }

    pub fn source(self) -> NodeState {
        match self {
            TransitionKind::InfectSusceptible | TransitionKind::Alert => NodeState::Susceptible,
            TransitionKind::InfectAlert => NodeState::Alert,
            TransitionKind::Recover => NodeState::Infected,
        }
    }

    pub fn target(self) -> NodeState {
        match self {
            TransitionKind::InfectSusceptible | TransitionKind::InfectAlert => NodeState::Infected,
            TransitionKind::Alert => NodeState::Alert,
            TransitionKind::Recover => NodeState::Susceptible,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub time: f64,
    pub node: usize,
    pub kind: TransitionKind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EventLog {
    pub seed: u64,
    pub t_max: f64,
    pub events: Vec<Event>,
    pub final_state: Vec<NodeState>,
    /// Time the last infected node recovered, `Some(0.0)` if nobody was
    /// infected initially, `None` if the run reached `t_max`.
    pub extinction_time: Option<f64>,
    pub peak_infected: usize,
}

impl EventLog {
    /// `time,node,kind`
    pub fn to_csv(&self) -> String {
        let mut out = String::from("time,node,kind\n");
        for e in &self.events {
            let _ = writeln!(out, "{},{},{}", e.time, e.node, e.kind.as_str());
        }
        out
    }

    pub fn summary(&self) -> RunSummary {
        RunSummary {
            seed: self.seed,
            extinct: self.extinction_time.is_some(),
            extinction_time: self.extinction_time,
            peak_infected: self.peak_infected,
            final_infected: self.final_state.iter().filter(|&&s| s == NodeState::Infected).count(),
            final_alert: self.final_state.iter().filter(|&&s| s == NodeState::Alert).count(),
            events: self.events.len(),
        }
    }
}

/// Incremental simulator; [`gillespie_run`] drives it to completion.
pub struct Simulator<'a> {
    graph: &'a Graph,
    params: &'a SaisParams,
    state: Vec<NodeState>,
    infected_neighbors: Vec<u32>,
    rates: Vec<f64>,
    infected: usize,
    time: f64,
    rng: ChaCha8Rng,
}

impl<'a> Simulator<'a> {
    pub fn new(graph: &'a Graph, params: &'a SaisParams, init: &[NodeState], seed: u64) -> Result<Self> {
        params.check_graph(graph)?;
        if init.len() != graph.node_count() {
            return Err(Error::DimensionMismatch {
                what: "initial states vs graph nodes",
                expected: graph.node_count(),
                got: init.len(),
            });
        }
        let mut sim = Self {
            graph,
            params,
            state: init.to_vec(),
            infected_neighbors: vec![0; init.len()],
            rates: vec![0.0; init.len()],
            infected: init.iter().filter(|&&s| s == NodeState::Infected).count(),
            time: 0.0,
            rng: ChaCha8Rng::seed_from_u64(seed),
        };
        sim.infected_neighbors = sim.recount_infected_neighbors();
        for i in 0..init.len() {
            sim.rates[i] = sim.node_rate(i);
        }
        Ok(sim)
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn state(&self) -> &[NodeState] {
        &self.state
    }

    pub fn infected_count(&self) -> usize {
        self.infected
    }

    /// Incrementally maintained `Y_i`.
    pub fn infected_neighbors(&self) -> &[u32] {
        &self.infected_neighbors
    }

    /// `Y_i` recomputed from the current states.
    pub fn recount_infected_neighbors(&self) -> Vec<u32> {
        (0..self.state.len())
            .map(|i| {
                self.graph
                    .neighbors(i)
                    .iter()
                    .filter(|&&j| self.state[j] == NodeState::Infected)
                    .count() as u32
            })
            .collect()
    }

    fn node_rate(&self, i: usize) -> f64 {
        let y = self.infected_neighbors[i] as f64;
        let p = self.params;
        match self.state[i] {
            NodeState::Susceptible => (p.beta[i] + p.kappa[i]) * y,
            NodeState::Alert => p.r[i] * p.beta[i] * y,
            NodeState::Infected => p.delta[i],
        }
    }

    /// Fires the next event if it happens no later than `t_max`.
    pub fn step(&mut self, t_max: f64) -> Option<Event> {
        if self.infected == 0 {
            return None;
        }
        let total: f64 = self.rates.iter().sum();
        if total <= 0.0 {
            return None;
        }
        let u: f64 = self.rng.sample(Open01);
        let t_next = self.time - u.ln() / total;
        if t_next > t_max {
            self.time = t_max;
            return None;
        }
        let mut target = self.rng.random::<f64>() * total;
        let mut chosen = None;
        for (i, &rate) in self.rates.iter().enumerate() {
            if rate <= 0.0 {
                continue;
            }
            chosen = Some(i);
            if target < rate {
                break;
            }
            target -= rate;
        }
        let node = chosen?;
        let target = target.min(self.rates[node]);
        let p = self.params;
        let kind = match self.state[node] {
            NodeState::Susceptible => {
                let infect = p.beta[node] * self.infected_neighbors[node] as f64;
                if target < infect {
                    TransitionKind::InfectSusceptible
                } else {
                    TransitionKind::Alert
                }
            }
            NodeState::Alert => TransitionKind::InfectAlert,
            NodeState::Infected => TransitionKind::Recover,
        };
        self.apply(node, kind);
        self.time = t_next;
        Some(Event {
            time: t_next,
            node,
            kind,
        })
    }

    fn apply(&mut self, node: usize, kind: TransitionKind) {
        let before = self.state[node];
        let after = kind.target();
        self.state[node] = after;
        self.rates[node] = self.node_rate(node);
        let delta: i64 = match (before == NodeState::Infected, after == NodeState::Infected) {
            (false, true) => 1,
            (true, false) => -1,
            _ => 0,
        };
        if delta == 0 {
            return;
        }
        self.infected = (self.infected as i64 + delta) as usize;
        for &j in self.graph.neighbors(node) {
            self.infected_neighbors[j] = (self.infected_neighbors[j] as i64 + delta) as u32;
            self.rates[j] = self.node_rate(j);
        }
    }
}

/// Runs one trajectory until `t_max` or extinction.
pub fn gillespie_run(g: &Graph, params: &SaisParams, init: &[NodeState], t_max: f64, seed: u64) -> Result<EventLog> {
    if !(t_max > 0.0) {
        return Err(Error::InvalidParameter(format!("t_max = {t_max} must be positive")));
    }
    let mut sim = Simulator::new(g, params, init, seed)?;
    let mut events = Vec::new();
    let mut peak = sim.infected_count();
    let mut extinction_time = (sim.infected_count() == 0).then_some(0.0);
    while let Some(event) = sim.step(t_max) {
        events.push(event);
        peak = peak.max(sim.infected_count());
        if sim.infected_count() == 0 {
            extinction_time = Some(event.time);
            break;
        }
    }
    Ok(EventLog {
        seed,
        t_max,
        events,
        final_state: sim.state,
        extinction_time,
        peak_infected: peak,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub seed: u64,
    pub extinct: bool,
    pub extinction_time: Option<f64>,
    pub peak_infected: usize,
    pub final_infected: usize,
    pub final_alert: usize,
    pub events: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSummary {
    pub runs: usize,
    pub base_seed: u64,
    pub t_max: f64,
    pub extinct_fraction: f64,
    pub mean_peak_infected: f64,
    pub per_run: Vec<RunSummary>,
}

/// `runs` independent trajectories with seeds `seed..seed + runs`, executed
/// in parallel and reported in seed order.
pub fn ensemble_extinction(
    g: &Graph,
    params: &SaisParams,
    init: &[NodeState],
    t_max: f64,
    runs: usize,
    seed: u64,
) -> Result<EnsembleSummary> {
    if runs == 0 {
        return Err(Error::InvalidParameter("ensemble needs at least one run".into()));
    }
    let per_run = (0..runs as u64)
        .into_par_iter()
        .map(|k| gillespie_run(g, params, init, t_max, seed.wrapping_add(k)).map(|log| log.summary()))
        .collect::<Result<Vec<_>>>()?;
    let extinct = per_run.iter().filter(|r| r.extinct).count();
    let peak: usize = per_run.iter().map(|r| r.peak_infected).sum();
    Ok(EnsembleSummary {
        runs,
        base_seed: seed,
        t_max,
        extinct_fraction: extinct as f64 / runs as f64,
        mean_peak_infected: peak as f64 / runs as f64,
        per_run,
    })
}

/// All susceptible except the listed nodes.
pub fn seeded_infection(n: usize, infected: &[usize]) -> Vec<NodeState> {
    let mut s = vec![NodeState::Susceptible; n];
    for &i in infected {
        s[i] = NodeState::Infected;
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphKind;

    #[test]
    fn no_infection_no_events() {
        let g = Graph::generate(GraphKind::Complete, 4, 0).unwrap();
        let p = SaisParams::homogeneous(4, 1.0, 1.0, 1.0, 0.5).unwrap();
        let log = gillespie_run(&g, &p, &seeded_infection(4, &[]), 10.0, 3).unwrap();
        assert!(log.events.is_empty());
        assert_eq!(log.extinction_time, Some(0.0));
        assert_eq!(log.peak_infected, 0);
    }

    #[test]
    fn isolated_node_recovers_once() {
        let g = Graph::empty(1);
        let p = SaisParams::homogeneous(1, 1.0, 1.0, 0.0, 0.5).unwrap();
        let log = gillespie_run(&g, &p, &[NodeState::Infected], 1e6, 11).unwrap();
        assert_eq!(log.events.len(), 1);
        assert_eq!(log.events[0].kind, TransitionKind::Recover);
        assert_eq!(log.extinction_time, Some(log.events[0].time));
        assert_eq!(log.final_state, vec![NodeState::Susceptible]);
    }

    #[test]
    fn horizon_cuts_run() {
        let g = Graph::empty(1);
        let p = SaisParams::homogeneous(1, 1.0, 1e-6, 0.0, 0.5).unwrap();
        let log = gillespie_run(&g, &p, &[NodeState::Infected], 1.0, 2).unwrap();
        assert!(log.events.is_empty());
        assert_eq!(log.extinction_time, None);
        assert_eq!(log.final_state, vec![NodeState::Infected]);
    }

    #[test]
    fn replay_is_bit_identical() {
        let g = Graph::generate(GraphKind::ErdosRenyi { p: 0.2 }, 30, 5).unwrap();
        let p = SaisParams::homogeneous(30, 0.6, 1.0, 0.4, 0.3).unwrap();
        let init = seeded_infection(30, &[0, 7, 13]);
        let a = gillespie_run(&g, &p, &init, 20.0, 99).unwrap();
        let b = gillespie_run(&g, &p, &init, 20.0, 99).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_csv(), b.to_csv());
        let c = gillespie_run(&g, &p, &init, 20.0, 100).unwrap();
        assert_ne!(a.events, c.events);
    }

    #[test]
    fn ensemble_of_one_matches_single_run() {
        let g = Graph::generate(GraphKind::Cycle, 6, 0).unwrap();
        let p = SaisParams::homogeneous(6, 1.0, 1.0, 0.5, 0.5).unwrap();
        let init = seeded_infection(6, &[2]);
        let ens = ensemble_extinction(&g, &p, &init, 50.0, 1, 42).unwrap();
        let single = gillespie_run(&g, &p, &init, 50.0, 42).unwrap().summary();
        assert_eq!(ens.per_run, vec![single.clone()]);
        assert_eq!(ens.extinct_fraction, if single.extinct { 1.0 } else { 0.0 });
        assert_eq!(ens.mean_peak_infected, single.peak_infected as f64);
    }

    #[test]
    fn healthy_ensemble_all_extinct() {
        let g = Graph::generate(GraphKind::Complete, 5, 0).unwrap();
        let p = SaisParams::homogeneous(5, 2.0, 1.0, 0.0, 0.5).unwrap();
        let ens = ensemble_extinction(&g, &p, &seeded_infection(5, &[]), 10.0, 20, 0).unwrap();
        assert_eq!(ens.extinct_fraction, 1.0);
    }

    #[test]
    fn preconditions() {
        let g = Graph::empty(2);
        let p = SaisParams::homogeneous(2, 1.0, 1.0, 0.0, 0.5).unwrap();
        assert!(gillespie_run(&g, &p, &seeded_infection(3, &[0]), 1.0, 0).is_err());
        assert!(gillespie_run(&g, &p, &seeded_infection(2, &[0]), 0.0, 0).is_err());
        assert!(ensemble_extinction(&g, &p, &seeded_infection(2, &[0]), 1.0, 0, 0).is_err());
    }

    #[test]
    fn csv_layout() {
        let g = Graph::empty(1);
        let p = SaisParams::homogeneous(1, 1.0, 1.0, 0.0, 0.5).unwrap();
        let log = gillespie_run(&g, &p, &[NodeState::Infected], 1e6, 1).unwrap();
        let csv = log.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("time,node,kind"));
        assert!(lines.next().unwrap().ends_with(",0,recover"));
    }
}
