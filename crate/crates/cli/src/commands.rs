use std::fs;
use std::path::{Path, PathBuf};

use log::{info, warn};
use serde::Serialize;
use serde_json::{json, Map, Value};

use sais_core::allocation::{solve_allocation, AllocationResult, AllocationStatus};
use sais_core::eigen::EigenOptions;
use sais_core::graph::{Graph, GraphKind};
use sais_core::sais::{
    epidemic_threshold, integrate_mean_field, spectral_margin, MeanFieldConfig, SaisParams, StateVector,
};
use sais_core::stats::spearman;
use sais_core::stochastic::{ensemble_extinction, gillespie_run, seeded_infection};

use crate::config::{BetaRecipe, Resolved, RunConfig, SimulationMode};
use crate::error::{CliError, CliResult, EXIT_NEGATIVE, EXIT_OK};
use crate::output::{write_atomic, OutputDir};

#[derive(Serialize)]
struct GraphInfo<'a> {
    source: &'a str,
    nodes: usize,
    edges: usize,
    lambda1: f64,
    connected: bool,
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    config: &'a RunConfig,
    graph: GraphInfo<'a>,
    #[serde(skip_serializing_if = "Option::is_none")]
    beta_recipe: Option<&'a BetaRecipe>,
    results: Map<String, Value>,
    outputs: Vec<String>,
}

/// Writes `config.toml` (the resolved config, rerunnable as is) and
/// `manifest.json` after the command's own outputs.
fn finish(
    out: &mut OutputDir,
    command: &'static str,
    config: &RunConfig,
    resolved: &Resolved,
    results: Map<String, Value>,
) -> CliResult<()> {
    let mut rerun = config.clone();
    rerun.out = Some(out.root().to_path_buf());
    out.write("config.toml", &rerun.to_toml()?)?;
    let mut outputs = out.written().to_vec();
    outputs.push("manifest.json".into());
    let manifest = Manifest {
        tool: "sais",
        version: env!("CARGO_PKG_VERSION"),
        command,
        config: &rerun,
        graph: GraphInfo {
            source: &resolved.graph_source,
            nodes: resolved.graph.node_count(),
            edges: resolved.graph.edge_count(),
            lambda1: resolved.lambda1,
            connected: resolved.graph.is_connected(),
        },
        beta_recipe: resolved.beta_recipe.as_ref(),
        results,
        outputs,
    };
    out.write_json("manifest.json", &manifest)?;
    Ok(())
}

/// Backoff requested on the command line: `Some(None)` means the flag was
/// given without a value and picks `1e-3 · min δ`.
pub fn resolve_backoff(flag: Option<Option<f64>>, params: &SaisParams, configured: f64) -> f64 {
    match flag {
        Some(Some(eps)) => eps,
        Some(None) => 1e-3 * params.min_delta(),
        None => configured,
    }
}

pub fn allocate(config: &RunConfig, backoff: Option<Option<f64>>) -> CliResult<u8> {
    let resolved = config.resolve()?;
    let cost = resolved.cost()?;
    let instance = sais_core::assemble_sdp(&resolved.graph, &resolved.params, cost)?;
    let mut options = config.solver.clone();
    options.epsilon_backoff = resolve_backoff(backoff, &resolved.params, options.epsilon_backoff);

    let (result, converged) = match solve_allocation(&instance, &options) {
        Ok(r) => (r, true),
        Err(sais_core::Error::SolverIterationCap { best, .. }) => (*best, false),
        Err(e) => return Err(e.into()),
    };

    let mut out = OutputDir::new(config.out_dir());
    out.write("allocation.json", &(result.to_json()? + "\n"))?;
    out.write("scatter.csv", &result.to_scatter_csv(&resolved.graph)?)?;

    let degrees: Vec<f64> = resolved.graph.degrees().iter().map(|&d| d as f64).collect();
    let rho = spearman(&result.investment, &degrees);
    let mut results = Map::new();
    results.insert("status".into(), json!(result.status));
    results.insert("converged".into(), json!(converged));
    results.insert("total_cost".into(), json!(result.total_cost));
    results.insert("margin".into(), json!(result.margin));
    results.insert("iterations".into(), json!(result.iterations));
    results.insert("epsilon_backoff".into(), json!(result.epsilon_backoff));
    match &rho {
        Ok(r) => results.insert("spearman_investment_degree".into(), json!(r)),
        Err(e) => {
            results.insert("spearman_investment_degree".into(), Value::Null);
            results.insert("spearman_note".into(), json!(e.to_string()))
        }
    };
    finish(&mut out, "allocate", config, &resolved, results)?;

    if let Some(report) = &result.infeasibility {
        eprintln!("infeasible: {report}");
        return Ok(EXIT_NEGATIVE);
    }
    if !converged {
        eprintln!(
            "solver hit the iteration cap; best iterate written (certified margin {:e})",
            result.margin
        );
        return Ok(EXIT_NEGATIVE);
    }
    println!("status      {}", result.status);
    println!("total cost  {}", result.total_cost);
    println!("margin      {:e}", result.margin);
    match rho {
        Ok(r) => println!("spearman    {r:.4}"),
        Err(_) => println!("spearman    undefined"),
    }
    println!("written to  {}", out.root().display());
    Ok(EXIT_OK)
}

pub fn threshold(config: &RunConfig) -> CliResult<u8> {
    let resolved = config.resolve()?;
    let opts = EigenOptions::default();
    let stability = spectral_margin(&resolved.graph, &resolved.params, &opts)?;
    let threshold = epidemic_threshold(&resolved.graph, &resolved.params, &opts)?;
    if !stability.connected {
        warn!("graph is disconnected; the margin is the worst component's");
        println!("warning     graph is disconnected");
    }
    println!("margin      {:e}", stability.margin);
    println!("die_out     {}", stability.die_out);
    println!("theta_c     {}", threshold.theta_c);
    println!("lambda1_ha  {}", threshold.lambda1_ha);
    let y = &stability.diag_threshold;
    let y_min = y.iter().copied().fold(f64::INFINITY, f64::min);
    let y_max = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    println!("y range     [{y_min}, {y_max}]");

    let mut out = OutputDir::new(config.out_dir());
    out.write_json(
        "threshold.json",
        &json!({ "stability": stability, "threshold": threshold }),
    )?;
    let mut results = Map::new();
    results.insert("margin".into(), json!(stability.margin));
    results.insert("die_out".into(), json!(stability.die_out));
    results.insert("theta_c".into(), json!(threshold.theta_c));
    finish(&mut out, "threshold", config, &resolved, results)?;
    Ok(if stability.die_out { EXIT_OK } else { EXIT_NEGATIVE })
}

pub struct SimulateRequest {
    pub mode: Option<SimulationMode>,
    pub runs: Option<usize>,
    pub allocation: Option<PathBuf>,
    pub compare: bool,
}

fn read_allocation(path: &Path, n: usize) -> CliResult<AllocationResult> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let result = AllocationResult::from_json(&text)
        .map_err(|e| CliError::Input(format!("{}: not an allocation file ({e})", path.display())))?;
    if result.kappa_star.len() != n {
        return Err(CliError::Input(format!(
            "{}: allocation has {} nodes, graph has {n}",
            path.display(),
            result.kappa_star.len()
        )));
    }
    if result.status == AllocationStatus::Infeasible {
        warn!(
            "{} records an infeasible instance; simulating kappa_upper",
            path.display()
        );
    }
    Ok(result)
}

pub fn simulate(config: &RunConfig, request: &SimulateRequest) -> CliResult<u8> {
    let resolved = config.resolve()?;
    let n = resolved.graph.node_count();
    let mode = request.mode.unwrap_or(config.simulate.mode);
    let runs = request.runs.unwrap_or(config.simulate.runs);

    let mut cases: Vec<(&str, SaisParams)> = Vec::new();
    match (&request.allocation, request.compare) {
        (None, true) => return Err(CliError::Input("--compare needs --allocation".into())),
        (None, false) => cases.push(("current", resolved.params.clone())),
        (Some(path), compare) => {
            let alloc = read_allocation(path, n)?;
            if compare {
                cases.push(("kappa_lower", resolved.at_lower()?));
            }
            cases.push(("kappa_star", resolved.params.with_kappa(alloc.kappa_star)?));
        }
    }

    let t_end = config.simulate.t_end.unwrap_or(100.0 / resolved.params.min_delta());
    let seed = config.simulation_seed();
    let mut out = OutputDir::new(config.out_dir());
    let mut results = Map::new();
    results.insert("mode".into(), json!(mode));
    results.insert("t_end".into(), json!(t_end));

    for (label, params) in &cases {
        let entry = match mode {
            SimulationMode::Meanfield => {
                let s = &config.simulate;
                let init = StateVector::uniform(n, s.p0)?;
                let mut mf = MeanFieldConfig::new(t_end).recording_every(s.record_every);
                if let Some(dt) = s.dt {
                    mf = mf.with_dt(dt);
                }
                let traj = integrate_mean_field(&resolved.graph, params, &init, &mf)?;
                out.write(&format!("trajectory_{label}.csv"), &traj.to_csv())?;
                let max_p = traj.final_state().max_p();
                println!("{label:<12} final max p {max_p:e}");
                json!({ "final_max_p": max_p, "min_slack_before_clamp": traj.min_slack_before_clamp })
            }
            SimulationMode::Gillespie => {
                let infected = &config.simulate.infected;
                if let Some(&bad) = infected.iter().find(|&&i| i >= n) {
                    return Err(CliError::Input(format!("infected node {bad} out of range (n = {n})")));
                }
                let init = seeded_infection(n, infected);
                let log = gillespie_run(&resolved.graph, params, &init, t_end, seed)?;
                out.write(&format!("events_{label}.csv"), &log.to_csv())?;
                let ensemble = ensemble_extinction(&resolved.graph, params, &init, t_end, runs, seed)?;
                out.write_json(&format!("ensemble_{label}.json"), &ensemble)?;
                println!(
                    "{label:<12} extinct {:.3} of {runs} runs, mean peak {:.2}",
                    ensemble.extinct_fraction, ensemble.mean_peak_infected
                );
                json!({ "extinct_fraction": ensemble.extinct_fraction, "runs": runs, "seed": seed })
            }
        };
        results.insert((*label).to_string(), entry);
    }
    info!("simulation outputs in {}", out.root().display());
    finish(&mut out, "simulate", config, &resolved, results)?;
    Ok(EXIT_OK)
}

pub fn gen_graph(kind: GraphKind, n: usize, seed: u64, out: Option<&Path>) -> CliResult<u8> {
    let g = Graph::generate(kind, n, seed)?;
    let text = g.to_edge_list();
    match out {
        Some(path) => write_atomic(path, text.as_bytes())?,
        None => print!("{text}"),
    }
    Ok(EXIT_OK)
}
