//! Log-barrier interior-point method for programs of the form
//!
//! ```text
//! min gᵀx  s.t.  diag(d0 + d1 ∘ x) - A - ε I ≻ 0,  a0_k + a1_k x_{i_k} > 0
//! ```
//!
//! Both allocation formulations reduce to this shape with one variable per
//! active node, so one Newton solver serves both.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// A scalar constraint `a0 + a1 x_node > 0`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Term {
    pub node: usize,
    pub a0: f64,
    pub a1: f64,
}

pub(crate) struct BarrierProblem<'a> {
    pub adjacency: &'a DMatrix<f64>,
    pub epsilon: f64,
    pub d0: Vec<f64>,
    pub d1: Vec<f64>,
    pub slope: Vec<f64>,
    pub terms: Vec<Term>,
    /// Componentwise lower bound of the feasible set; `gᵀ x_lower` bounds
    /// the optimum from below and seeds the barrier weight.
    pub x_lower: Vec<f64>,
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct BarrierSettings {
    pub gap_tol: f64,
    pub max_newton: usize,
}

/// Bounds on the factor the barrier weight grows by between centerings.
/// Long steps stall the damped Newton iteration far from the optimum, so the
/// factor starts small and adapts to how hard the last centering was.
const GROWTH_MIN: f64 = 2.0;
const GROWTH_MAX: f64 = 64.0;

pub(crate) struct BarrierOutcome {
    pub x: Vec<f64>,
    pub newton_steps: usize,
    pub converged: bool,
    pub gap: f64,
}

const CENTERING_TOL: f64 = 1e-10;

struct Point {
    cholesky: nalgebra::Cholesky<f64, nalgebra::Dyn>,
    logdet: f64,
    term_values: Vec<f64>,
}

impl BarrierProblem<'_> {
    fn dim(&self) -> usize {
        self.d0.len()
    }

    /// Barrier parameter `ν`: matrix order plus scalar terms.
    fn nu(&self) -> f64 {
        (self.dim() + self.terms.len()) as f64
    }

    fn point(&self, x: &[f64]) -> Option<Point> {
        let term_values: Vec<f64> = self.terms.iter().map(|t| t.a0 + t.a1 * x[t.node]).collect();
        if term_values.iter().any(|&v| !(v > 0.0)) {
            return None;
        }
        let n = self.dim();
        let mut s = -self.adjacency.clone();
        for i in 0..n {
            s[(i, i)] += self.d0[i] + self.d1[i] * x[i] - self.epsilon;
        }
        let cholesky = s.cholesky()?;
        let l = cholesky.l_dirty();
        let mut logdet = 0.0;
        for i in 0..n {
            let diag = l[(i, i)];
            if !(diag > 0.0) {
                return None;
            }
            logdet += 2.0 * diag.ln();
        }
        Some(Point {
            cholesky,
            logdet,
            term_values,
        })
    }

    /// `t gᵀ(x_new - x) - Δ log det S - Σ Δ log term`, computed as
    /// differences so large `t` does not swamp the comparison.
    fn phi_change(&self, t: f64, step: &[f64], from: &Point, to: &Point) -> f64 {
        let linear: f64 = self.slope.iter().zip(step).map(|(g, s)| g * s).sum();
        let terms: f64 = from
            .term_values
            .iter()
            .zip(&to.term_values)
            .map(|(a, b)| (b / a).ln())
            .sum();
        t * linear - (to.logdet - from.logdet) - terms
    }
}

pub(crate) fn minimize(
    problem: &BarrierProblem<'_>,
    x0: Vec<f64>,
    settings: BarrierSettings,
    mut on_iterate: impl FnMut(usize, &[f64], f64),
) -> Result<BarrierOutcome> {
    let n = problem.dim();
    let mut x = x0;
    let mut current = problem
        .point(&x)
        .ok_or_else(|| Error::InvalidParameter("barrier start point is not strictly feasible".into()))?;
    let nu = problem.nu();
    let spread: f64 = problem
        .slope
        .iter()
        .zip(x.iter().zip(&problem.x_lower))
        .map(|(g, (x, lo))| g * (x - lo))
        .sum();
    let mut t = if spread > 0.0 { nu / spread } else { 1.0 };
    let mut steps = 0;
    let mut growth = GROWTH_MIN;
    loop {
        let centering_start = steps;
        loop {
            if steps >= settings.max_newton {
                return Ok(BarrierOutcome {
                    x,
                    newton_steps: steps,
                    converged: false,
                    gap: nu / t,
                });
            }
            let s_inv = current.cholesky.inverse();
            let mut grad = DVector::zeros(n);
            let mut hess = DMatrix::zeros(n, n);
            for i in 0..n {
                grad[i] = t * problem.slope[i] - problem.d1[i] * s_inv[(i, i)];
                for j in 0..n {
                    let v = s_inv[(i, j)];
                    hess[(i, j)] = problem.d1[i] * problem.d1[j] * v * v;
                }
            }
            for (term, &value) in problem.terms.iter().zip(&current.term_values) {
                grad[term.node] -= term.a1 / value;
                hess[(term.node, term.node)] += (term.a1 / value).powi(2);
            }
            let direction = newton_direction(hess, &grad)?;
            let slope_along = grad.dot(&direction);
            let decrement = -slope_along;
            if decrement / 2.0 <= CENTERING_TOL {
                break;
            }
            let mut step = 1.0;
            let mut accepted = None;
            while step > 1e-14 {
                let delta: Vec<f64> = direction.iter().map(|d| step * d).collect();
                let candidate: Vec<f64> = x.iter().zip(&delta).map(|(a, b)| a + b).collect();
                if let Some(next) = problem.point(&candidate) {
                    if problem.phi_change(t, &delta, &current, &next) <= 0.25 * step * slope_along {
                        accepted = Some((candidate, next));
                        break;
                    }
                }
                step *= 0.5;
            }
            steps += 1;
            match accepted {
                Some((candidate, next)) => {
                    let stalled = candidate
                        .iter()
                        .zip(&x)
                        .all(|(a, b)| (a - b).abs() <= 1e-13 * b.abs().max(1.0));
                    x = candidate;
                    current = next;
                    on_iterate(steps, &x, t);
                    if stalled {
                        break;
                    }
                }
                // no progress possible at working precision
                None => break,
            }
        }
        let gap = nu / t;
        if gap <= settings.gap_tol {
            return Ok(BarrierOutcome {
                x,
                newton_steps: steps,
                converged: true,
                gap,
            });
        }
        let centering_steps = steps - centering_start;
        if centering_steps <= 3 {
            growth = (growth * 2.0).min(GROWTH_MAX);
        } else if centering_steps > 10 {
            growth = (growth / 2.0).max(GROWTH_MIN);
        }
        t *= growth;
    }
}

fn newton_direction(hess: DMatrix<f64>, grad: &DVector<f64>) -> Result<DVector<f64>> {
    let scale = (0..hess.nrows()).fold(0.0f64, |m, i| m.max(hess[(i, i)]));
    let mut shift = 0.0;
    for _ in 0..8 {
        let mut h = hess.clone();
        for i in 0..h.nrows() {
            h[(i, i)] += shift;
        }
        if let Some(chol) = h.cholesky() {
            return Ok(-chol.solve(grad));
        }
        shift = if shift == 0.0 {
            1e-14 * scale.max(1e-300)
        } else {
            shift * 100.0
        };
    }
    Err(Error::Lp("barrier Hessian is not positive definite"))
}
