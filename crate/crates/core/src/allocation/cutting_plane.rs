//! Outer approximation of the matrix constraint by linear cuts.
//!
//! For any unit vector `v`, `diag(D(x)) - A - ε I ⪰ 0` implies
//! `Σ_k v_k² D_k(x) ≥ vᵀ (A + ε I) v`, which is linear in `x`. Each round
//! solves the LP over the cuts collected so far and adds the eigenvectors of
//! `A + ε I - diag(D(x))` with positive eigenvalue as new cuts.

use nalgebra::DMatrix;

use super::lp::DualSimplex;
use crate::eigen::symmetric_eigen;
use crate::error::Result;

pub(crate) struct CutProblem<'a> {
    pub adjacency: &'a DMatrix<f64>,
    pub epsilon: f64,
    pub cost: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Per active node, `D_k(x) = d_const[k] + Σ coef · x[var]`.
    pub d_const: Vec<f64>,
    pub d_terms: Vec<Vec<(usize, f64)>>,
    /// Fixed rows `lo ≤ aᵀx ≤ hi`.
    pub rows: Vec<(Vec<f64>, f64, f64)>,
}

pub(crate) struct CutOutcome {
    pub x: Vec<f64>,
    pub rounds: usize,
    pub converged: bool,
    /// `λ1(A + ε I - diag(D(x)))` at the returned point.
    pub lambda: f64,
    pub cuts: usize,
}

impl CutProblem<'_> {
    pub fn diagonal(&self, x: &[f64]) -> Vec<f64> {
        self.d_const
            .iter()
            .zip(&self.d_terms)
            .map(|(c, terms)| c + terms.iter().map(|&(j, a)| a * x[j]).sum::<f64>())
            .collect()
    }

    fn cut(&self, v: &[f64]) -> Option<(Vec<f64>, f64)> {
        let mut coefs = vec![0.0; self.cost.len()];
        let mut rhs = 0.0;
        for (k, &vk) in v.iter().enumerate() {
            let w = vk * vk;
            rhs += w * self.epsilon - w * self.d_const[k];
            for &(j, a) in &self.d_terms[k] {
                coefs[j] += w * a;
            }
        }
        for (i, &vi) in v.iter().enumerate() {
            for (j, &vj) in v.iter().enumerate() {
                let a = self.adjacency[(i, j)];
                if a != 0.0 {
                    rhs += a * vi * vj;
                }
            }
        }
        let scale = coefs.iter().fold(0.0f64, |m, a| m.max(a.abs()));
        if !(scale > 0.0) {
            return None;
        }
        coefs.iter_mut().for_each(|a| *a /= scale);
        Some((coefs, rhs / scale))
    }
}

pub(crate) fn solve(
    problem: &CutProblem<'_>,
    tol: f64,
    max_rounds: usize,
    cuts_per_round: usize,
    project: impl Fn(&mut [f64]),
    mut on_round: impl FnMut(usize, &[f64], f64),
) -> Result<CutOutcome> {
    let mut lp = DualSimplex::new(problem.cost.clone(), problem.lower.clone(), problem.upper.clone())?;
    for (a, lo, hi) in &problem.rows {
        lp.add_row(a, *lo, *hi)?;
    }
    let mut cuts = 0;
    let mut x = Vec::new();
    let mut lambda = f64::INFINITY;
    for round in 1..=max_rounds {
        x = lp.solve()?.x;
        project(&mut x);
        let d = problem.diagonal(&x);
        let mut m = problem.adjacency.clone();
        for (k, dk) in d.iter().enumerate() {
            m[(k, k)] += problem.epsilon - dk;
        }
        let spectrum = symmetric_eigen(&m)?;
        let n = spectrum.dim();
        lambda = spectrum.values[n - 1];
        on_round(round, &x, lambda);
        if lambda <= tol {
            return Ok(CutOutcome {
                x,
                rounds: round,
                converged: true,
                lambda,
                cuts,
            });
        }
        for j in (0..n).rev().take(cuts_per_round.max(1)) {
            if spectrum.values[j] <= tol {
                break;
            }
            if let Some((coefs, rhs)) = problem.cut(&spectrum.vector(j)) {
                lp.add_row(&coefs, rhs, f64::INFINITY)?;
                cuts += 1;
            }
        }
    }
    Ok(CutOutcome {
        x,
        rounds: max_rounds,
        converged: false,
        lambda,
        cuts,
    })
}
