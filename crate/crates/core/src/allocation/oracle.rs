//! Brute-force grid search for tiny instances, used to validate the solvers.

use nalgebra::{DMatrix, SymmetricEigen};

use super::cost::CostModel;
use super::transform::NodeRates;
use super::{finish, AllocationResult, Formulation, InfeasibilityReport, SolverMethod, SolverOptions};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::sais::SaisParams;

pub const ORACLE_MAX_NODES: usize = 4;

/// Feasibility threshold on `λ1(A - diag(y))` at grid points.
const GRID_TOL: f64 = 1e-9;

struct Grid {
    adjacency: DMatrix<f64>,
    y: Vec<Vec<f64>>,
    cost: Vec<Vec<f64>>,
}

impl Grid {
    fn feasible(&self, idx: &[usize]) -> bool {
        let mut m = self.adjacency.clone();
        for (i, &k) in idx.iter().enumerate() {
            m[(i, i)] -= self.y[i][k];
        }
        let eig = SymmetricEigen::new(m);
        eig.eigenvalues.iter().all(|&l| l <= GRID_TOL)
    }

    fn total(&self, idx: &[usize]) -> f64 {
        idx.iter().enumerate().map(|(i, &k)| self.cost[i][k]).sum()
    }
}

/// Exhaustive search over `grid_points` evenly spaced awareness rates per
/// node. Feasibility is monotone in each coordinate, so for every setting of
/// the leading nodes the last two are swept with a two-pointer scan instead
/// of a full square. Ties resolve to the lexicographically smallest grid index.
pub fn oracle_grid_solve(
    g: &Graph,
    params: &SaisParams,
    cost: &CostModel,
    grid_points: usize,
) -> Result<AllocationResult> {
    let n = g.node_count();
    if n > ORACLE_MAX_NODES {
        return Err(Error::OracleTooLarge {
            max: ORACLE_MAX_NODES,
            n,
        });
    }
    if grid_points < 2 {
        return Err(Error::InvalidParameter("oracle grid needs at least 2 points".into()));
    }
    let instance = super::assemble_sdp(g, params, cost)?;
    let kappa_of = |i: usize, k: usize| {
        let c = &cost.nodes[i];
        if k + 1 == grid_points {
            c.kappa_upper
        } else {
            c.kappa_lower + (c.kappa_upper - c.kappa_lower) * k as f64 / (grid_points - 1) as f64
        }
    };
    let mut grid = Grid {
        adjacency: g.adjacency_matrix(),
        y: Vec::with_capacity(n),
        cost: Vec::with_capacity(n),
    };
    for i in 0..n {
        let rates = NodeRates::of(params, i);
        let mut y = Vec::with_capacity(grid_points);
        let mut f = Vec::with_capacity(grid_points);
        for k in 0..grid_points {
            let kappa = kappa_of(i, k);
            y.push(rates.y_from_kappa(kappa));
            f.push(cost.nodes[i].eval(kappa)?);
        }
        grid.y.push(y);
        grid.cost.push(f);
    }

    let top = grid_points - 1;
    let mut best: Option<(f64, Vec<usize>)> = None;
    let improves = |value: f64, best: &Option<(f64, Vec<usize>)>| best.as_ref().map_or(true, |(b, _)| value < *b);

    if n == 1 {
        if let Some(k) = (0..grid_points).find(|&k| grid.feasible(&[k])) {
            best = Some((grid.total(&[k]), vec![k]));
        }
    } else if n >= 2 {
        let lead = n - 2;
        let floor_tail = grid.cost[n - 2][0] + grid.cost[n - 1][0];
        let mut idx = vec![0usize; n];
        'prefixes: loop {
            let prefix_cost: f64 = (0..lead).map(|i| grid.cost[i][idx[i]]).sum();
            if improves(prefix_cost + floor_tail, &best) {
                let mut b = top;
                for a in 0..grid_points {
                    idx[n - 2] = a;
                    if !improves(prefix_cost + grid.cost[n - 2][a] + grid.cost[n - 1][0], &best) {
                        break;
                    }
                    idx[n - 1] = b;
                    if !grid.feasible(&idx) {
                        continue;
                    }
                    while b > 0 {
                        idx[n - 1] = b - 1;
                        if !grid.feasible(&idx) {
                            break;
                        }
                        b -= 1;
                    }
                    idx[n - 1] = b;
                    let value = grid.total(&idx);
                    if improves(value, &best) {
                        best = Some((value, idx.clone()));
                    }
                }
            }
            // advance the odometer over the leading nodes
            let mut pos = lead;
            loop {
                if pos == 0 {
                    break 'prefixes;
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < grid_points {
                    break;
                }
                idx[pos] = 0;
            }
        }
    }

    let options = SolverOptions::default();
    let (kappa, infeasibility) = match best {
        Some((_, idx)) => (
            idx.iter().enumerate().map(|(i, &k)| kappa_of(i, k)).collect::<Vec<_>>(),
            None,
        ),
        None => {
            let upper: Vec<f64> = cost.kappa_upper();
            let report = InfeasibilityReport::at_upper(&instance, 0.0)?;
            (upper, Some(report))
        }
    };
    let (u, w): (Vec<f64>, Vec<f64>) = kappa
        .iter()
        .enumerate()
        .map(|(i, &k)| NodeRates::of(params, i).charnes_cooper(k))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .unzip();
    finish(
        &instance,
        &options,
        u,
        w,
        SolverMethod::Oracle,
        Formulation::Reduced,
        grid_points.checked_pow(n as u32).unwrap_or(usize::MAX),
        Vec::new(),
        infeasibility,
    )
}
