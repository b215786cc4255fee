//! Run configuration: a TOML file with `[graph]`, `[params]`, `[cost]`,
//! `[solver]` and `[simulate]` sections. Per-node vectors may be given as
//! a scalar, an inline array, or the path of a CSV side file (resolved
//! relative to the config file).

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use sais_core::allocation::{CostModel, SolverOptions};
use sais_core::eigen::{largest_eigenvalue, EigenOptions};
use sais_core::graph::{Graph, GraphKind};
use sais_core::sais::SaisParams;

use crate::error::{CliError, CliResult};

/// The infection rate printed next to the stress-ratio recipe in the
/// original experiment description. It does not follow from the recipe's
/// own formula, so both numbers are recorded.
pub const REFERENCE_BETA_LITERAL: f64 = 7.4e-3;

/// A per-node quantity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Values {
    Scalar(f64),
    List(Vec<f64>),
    File(PathBuf),
}

impl Values {
    /// Values as written (a scalar stays length one); files are read here.
    fn load(&self, what: &str) -> CliResult<Vec<f64>> {
        match self {
            Values::Scalar(x) => Ok(vec![*x]),
            Values::List(v) if v.is_empty() => Err(CliError::Input(format!("{what}: empty list"))),
            Values::List(v) => Ok(v.clone()),
            Values::File(path) => read_vector_csv(path),
        }
    }

    /// Values broadcast to `n` nodes.
    fn expand(&self, n: usize, what: &str) -> CliResult<Vec<f64>> {
        let v = self.load(what)?;
        match v.len() {
            1 => Ok(vec![v[0]; n]),
            len if len == n => Ok(v),
            len => Err(CliError::Input(format!("{what}: expected 1 or {n} values, got {len}"))),
        }
    }

    fn rebase(&mut self, dir: &Path) {
        if let Values::File(p) = self {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        }
    }
}

/// Reads one value per line, either `value` or `node,value` with nodes in
/// order. Blank lines and `#` comments are skipped, as is a non-numeric
/// header on the first data line.
pub fn read_vector_csv(path: &Path) -> CliResult<Vec<f64>> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let bad = |line: usize, msg: String| CliError::Input(format!("{}:{line}: {msg}", path.display()));
    let mut out = Vec::new();
    let mut seen_data = false;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let first_data = !seen_data;
        seen_data = true;
        let value = match fields.as_slice() {
            [v] => v.parse::<f64>(),
            [node, v] => {
                match node.parse::<usize>() {
                    Ok(k) if k == out.len() => {}
                    Ok(k) => return Err(bad(idx + 1, format!("node {k} out of order, expected {}", out.len()))),
                    Err(_) if first_data => continue,
                    Err(_) => return Err(bad(idx + 1, format!("invalid node id `{node}`"))),
                }
                v.parse::<f64>()
            }
            _ => return Err(bad(idx + 1, "expected `value` or `node,value`".into())),
        };
        match value {
            Ok(x) => out.push(x),
            Err(_) if first_data => continue,
            Err(_) => return Err(bad(idx + 1, format!("invalid number in `{line}`"))),
        }
    }
    if out.is_empty() {
        return Err(CliError::Input(format!("{}: no values", path.display())));
    }
    Ok(out)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSection {
    /// Edge-list file.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
    /// Generator, e.g. `pa:2`, `er:0.1`, `star`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Generator seed; defaults to the run seed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<Values>,
    /// Sets `β_i = stress_ratio · δ_i / λ1(A)` instead of giving `beta`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stress_ratio: Option<f64>,
    pub delta: Values,
    pub r: Values,
    /// Current awareness rates for `threshold` and `simulate`; defaults to
    /// the lower cost bound (or 0 without a `[cost]` section).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<Values>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostSection {
    #[serde(default = "one")]
    pub c_bar: Values,
    #[serde(default = "zero")]
    pub kappa_lower: Values,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa_upper: Option<Values>,
}

fn one() -> Values {
    Values::Scalar(1.0)
}

fn zero() -> Values {
    Values::Scalar(0.0)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SimulationMode {
    #[default]
    Meanfield,
    Gillespie,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateSection {
    pub mode: SimulationMode,
    /// Horizon; defaults to `100 / min δ`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    pub record_every: usize,
    /// Initial infection probability at every node (mean field).
    pub p0: f64,
    /// Initially infected nodes (Gillespie).
    pub infected: Vec<usize>,
    pub runs: usize,
    /// Defaults to the run seed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Default for SimulateSection {
    fn default() -> Self {
        Self {
            mode: SimulationMode::Meanfield,
            t_end: None,
            dt: None,
            record_every: 100,
            p0: 0.1,
            infected: vec![0],
            runs: 200,
            seed: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    pub graph: GraphSection,
    pub params: ParamsSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cost: Option<CostSection>,
    #[serde(default)]
    pub solver: SolverOptions,
    #[serde(default)]
    pub simulate: SimulateSection,
}

/// How `β` was derived from the stress-ratio recipe.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaRecipe {
    pub stress_ratio: f64,
    pub lambda1: f64,
    /// `stress_ratio · min δ / λ1(A)`.
    pub beta_formula: f64,
    /// The literal printed alongside the recipe in the source experiment.
    pub beta_reference_literal: f64,
}

/// Everything a command needs, built from a [`RunConfig`].
pub struct Resolved {
    pub graph: Graph,
    pub graph_source: String,
    pub lambda1: f64,
    /// Rates with the current awareness `κ`.
    pub params: SaisParams,
    pub cost: Option<CostModel>,
    pub beta_recipe: Option<BetaRecipe>,
}

impl RunConfig {
    pub fn parse(text: &str, path: &Path) -> CliResult<Self> {
        let mut cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        let dir = if dir.as_os_str().is_empty() {
            PathBuf::from(".")
        } else {
            dir
        };
        cfg.rebase(&dir);
        Ok(cfg)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, path)
    }

    /// Makes relative side-file paths relative to `dir`.
    fn rebase(&mut self, dir: &Path) {
        if let Some(f) = &mut self.graph.file {
            if f.is_relative() {
                *f = dir.join(&*f);
            }
        }
        let p = &mut self.params;
        for v in [p.beta.as_mut(), Some(&mut p.delta), Some(&mut p.r), p.kappa.as_mut()]
            .into_iter()
            .flatten()
        {
            v.rebase(dir);
        }
        if let Some(c) = &mut self.cost {
            for v in [Some(&mut c.c_bar), Some(&mut c.kappa_lower), c.kappa_upper.as_mut()]
                .into_iter()
                .flatten()
            {
                v.rebase(dir);
            }
        }
    }

    /// Replaces the graph section with an edge-list file.
    pub fn set_graph_file(&mut self, path: PathBuf) {
        self.graph = GraphSection {
            file: Some(path),
            ..GraphSection::default()
        };
    }

    pub fn simulation_seed(&self) -> u64 {
        self.simulate.seed.unwrap_or(self.seed)
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("results"))
    }

    pub fn to_toml(&self) -> CliResult<String> {
        toml::to_string(self).map_err(|e| CliError::Input(format!("cannot serialize config: {e}")))
    }

    pub fn load_graph(&self) -> CliResult<(Graph, String)> {
        match (&self.graph.file, &self.graph.kind) {
            (Some(path), None) => {
                let file = fs::File::open(path).map_err(|source| CliError::Read {
                    path: path.clone(),
                    source,
                })?;
                let g = Graph::from_edge_list(std::io::BufReader::new(file)).map_err(|e| match e {
                    sais_core::Error::Io(source) => CliError::Read {
                        path: path.clone(),
                        source,
                    },
                    other => CliError::Input(format!("{}: {other}", path.display())),
                })?;
                if g.node_count() == 0 {
                    return Err(CliError::Input(format!("{}: graph has no nodes", path.display())));
                }
                Ok((g, path.display().to_string()))
            }
            (None, Some(kind)) => {
                let parsed: GraphKind = kind.parse()?;
                let n = self
                    .graph
                    .n
                    .ok_or_else(|| CliError::Input("[graph] generator needs `n`".into()))?;
                let seed = self.graph.seed.unwrap_or(self.seed);
                Ok((Graph::generate(parsed, n, seed)?, format!("{parsed} n={n} seed={seed}")))
            }
            _ => Err(CliError::Input("[graph] needs exactly one of `file` or `kind`".into())),
        }
    }

    pub fn resolve(&self) -> CliResult<Resolved> {
        let (graph, graph_source) = self.load_graph()?;
        let n = graph.node_count();
        let lambda1 = largest_eigenvalue(&graph, &EigenOptions::default())?.lambda1;
        let p = &self.params;
        let delta = p.delta.expand(n, "delta")?;
        let r = p.r.expand(n, "r")?;
        let (beta, beta_recipe) = match (&p.beta, p.stress_ratio) {
            (Some(b), None) => (b.expand(n, "beta")?, None),
            (None, Some(ratio)) => {
                if !(ratio > 0.0) {
                    return Err(CliError::Input(format!("stress_ratio {ratio} must be positive")));
                }
                if !(lambda1 > 0.0) {
                    return Err(CliError::Input(
                        "stress_ratio needs a graph with at least one edge".into(),
                    ));
                }
                let beta: Vec<f64> = delta.iter().map(|d| ratio * d / lambda1).collect();
                let d_min = delta.iter().copied().fold(f64::INFINITY, f64::min);
                let recipe = BetaRecipe {
                    stress_ratio: ratio,
                    lambda1,
                    beta_formula: ratio * d_min / lambda1,
                    beta_reference_literal: REFERENCE_BETA_LITERAL,
                };
                (beta, Some(recipe))
            }
            _ => {
                return Err(CliError::Input(
                    "[params] needs exactly one of `beta` or `stress_ratio`".into(),
                ))
            }
        };
        let base = SaisParams::new(beta, delta, vec![0.0; n], r)?;
        let cost = match &self.cost {
            Some(c) => {
                let upper = c.kappa_upper.as_ref().map(|u| u.load("kappa_upper")).transpose()?;
                match upper {
                    Some(upper) => Some(CostModel::fit(
                        &base,
                        &c.c_bar.load("c_bar")?,
                        &c.kappa_lower.load("kappa_lower")?,
                        &upper,
                    )?),
                    None => None,
                }
            }
            None => None,
        };
        let kappa = match (&p.kappa, &self.cost) {
            (Some(k), _) => k.expand(n, "kappa")?,
            (None, Some(c)) => c.kappa_lower.expand(n, "kappa_lower")?,
            (None, None) => vec![0.0; n],
        };
        let params = base.with_kappa(kappa)?;
        Ok(Resolved {
            graph,
            graph_source,
            lambda1,
            params,
            cost,
            beta_recipe,
        })
    }
}

impl Resolved {
    pub fn cost(&self) -> CliResult<&CostModel> {
        self.cost
            .as_ref()
            .ok_or_else(|| CliError::Input("this command needs a [cost] section with `kappa_upper`".into()))
    }

    /// Rates with `κ` at the lower cost bound.
    pub fn at_lower(&self) -> CliResult<SaisParams> {
        Ok(self.params.with_kappa(self.cost()?.kappa_lower())?)
    }
}
