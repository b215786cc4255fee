//! Bounded dual simplex on a dense tableau.
//!
//! Every structural variable carries finite bounds, so the all-slack basis
//! with each structural parked at its cheaper bound is dual feasible from
//! the start. Rows can be appended after a solve; the basis stays dual
//! feasible and the next `solve` only repairs primal infeasibility, which is
//! what a cutting-plane loop needs.

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-11;

#[derive(Clone, Debug)]
pub struct DualSimplex {
    n_struct: usize,
    cost: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    /// Row `k` expresses basic variable `basis[k]` as a combination of the
    /// nonbasic variables. Columns of basic variables are zero.
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    basic_row: Vec<Option<usize>>,
    at_upper: Vec<bool>,
    reduced: Vec<f64>,
    /// Primal feasibility tolerance, scaled by `max(1, |bound|)`.
    pub feasibility_tol: f64,
    pub max_pivots: usize,
    pivots: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
}

impl DualSimplex {
    pub fn new(cost: Vec<f64>, lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let n = cost.len();
        if lower.len() != n || upper.len() != n {
            return Err(Error::DimensionMismatch {
                what: "LP bounds",
                expected: n,
                got: lower.len().min(upper.len()),
            });
        }
        for j in 0..n {
            if !(lower[j].is_finite() && upper[j].is_finite() && lower[j] <= upper[j] && cost[j].is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "LP variable {j} needs finite bounds lower <= upper (got [{}, {}])",
                    lower[j], upper[j]
                )));
            }
        }
        let at_upper = cost.iter().map(|&c| c < 0.0).collect();
        Ok(Self {
            n_struct: n,
            reduced: cost.clone(),
            cost,
            lower,
            upper,
            rows: Vec::new(),
            basis: Vec::new(),
            basic_row: vec![None; n],
            at_upper,
            feasibility_tol: 1e-9,
            max_pivots: 50_000,
            pivots: 0,
        })
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_structural(&self) -> usize {
        self.n_struct
    }

    /// Appends `lo ≤ Σ coefs[j] x_j ≤ hi` over the structural variables.
    /// Either side may be infinite.
    pub fn add_row(&mut self, coefs: &[f64], lo: f64, hi: f64) -> Result<()> {
        if coefs.len() != self.n_struct {
            return Err(Error::DimensionMismatch {
                what: "LP row",
                expected: self.n_struct,
                got: coefs.len(),
            });
        }
        if !(lo <= hi) || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
            return Err(Error::InvalidParameter(format!("LP row bounds [{lo}, {hi}] are empty")));
        }
        let width = self.lower.len() + 1;
        for row in &mut self.rows {
            row.push(0.0);
        }
        let mut new_row = vec![0.0; width];
        for (j, &a) in coefs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            match self.basic_row[j] {
                Some(k) => {
                    for (dst, &src) in new_row.iter_mut().zip(&self.rows[k]) {
                        *dst += a * src;
                    }
                }
                None => new_row[j] += a,
            }
        }
        let slack = width - 1;
        self.lower.push(lo);
        self.upper.push(hi);
        self.cost.push(0.0);
        self.reduced.push(0.0);
        self.at_upper.push(false);
        self.basic_row.push(Some(self.rows.len()));
        self.basis.push(slack);
        self.rows.push(new_row);
        Ok(())
    }

    fn nonbasic_value(&self, j: usize) -> f64 {
        if self.at_upper[j] {
            self.upper[j]
        } else {
            self.lower[j]
        }
    }

    fn basic_values(&self) -> Vec<f64> {
        let width = self.lower.len();
        let values: Vec<f64> = (0..width)
            .map(|j| {
                if self.basic_row[j].is_some() {
                    0.0
                } else {
                    self.nonbasic_value(j)
                }
            })
            .collect();
        self.rows
            .iter()
            .map(|row| row.iter().zip(&values).map(|(a, v)| a * v).sum())
            .collect()
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let leave = self.basis[r];
        let p = self.rows[r][q];
        let mut row = std::mem::take(&mut self.rows[r]);
        for a in row.iter_mut() {
            *a = -*a / p;
        }
        row[q] = 0.0;
        row[leave] = 1.0 / p;
        for (k, other) in self.rows.iter_mut().enumerate() {
            if k == r {
                continue;
            }
            let f = other[q];
            if f != 0.0 {
                for (dst, &src) in other.iter_mut().zip(&row) {
                    *dst += f * src;
                }
                other[q] = 0.0;
            }
        }
        let dq = self.reduced[q];
        if dq != 0.0 {
            for (d, &a) in self.reduced.iter_mut().zip(&row) {
                *d += dq * a;
            }
        }
        self.reduced[q] = 0.0;
        self.rows[r] = row;
        self.basis[r] = q;
        self.basic_row[q] = Some(r);
        self.basic_row[leave] = None;
        self.pivots += 1;
    }

    /// Reoptimizes from the current (dual feasible) basis.
    pub fn solve(&mut self) -> Result<LpSolution> {
        let start = self.pivots;
        loop {
            if self.pivots - start > self.max_pivots {
                return Err(Error::Lp("stalled: pivot limit reached"));
            }
            let values = self.basic_values();
            // leaving row: largest bound violation
            let mut leave: Option<(usize, bool, f64)> = None;
            for (k, &v) in values.iter().enumerate() {
                let b = self.basis[k];
                let (lo, hi) = (self.lower[b], self.upper[b]);
                let below = lo - v;
                let above = v - hi;
                let tol_lo = self.feasibility_tol * lo.abs().max(1.0);
                let tol_hi = self.feasibility_tol * hi.abs().max(1.0);
                if below > tol_lo && leave.map_or(true, |(_, _, worst)| below > worst) {
                    leave = Some((k, false, below));
                } else if above > tol_hi && leave.map_or(true, |(_, _, worst)| above > worst) {
                    leave = Some((k, true, above));
                }
            }
            let Some((r, to_upper, _)) = leave else {
                return Ok(self.solution());
            };
            // to_upper: the basic variable must decrease, so the entering
            // variable must push the row value down.
            let direction = if to_upper { -1.0 } else { 1.0 };
            let row = &self.rows[r];
            let row_scale = row.iter().fold(0.0f64, |m, a| m.max(a.abs()));
            let mut best: Option<(usize, f64, f64)> = None;
            for (j, &a) in row.iter().enumerate() {
                if self.basic_row[j].is_some() || a.abs() <= PIVOT_TOL * row_scale.max(1.0) {
                    continue;
                }
                let can_increase = !self.at_upper[j] && self.upper[j] > self.lower[j];
                let can_decrease = self.at_upper[j] && self.upper[j] > self.lower[j];
                let eligible = (direction * a > 0.0 && can_increase) || (direction * a < 0.0 && can_decrease);
                if !eligible {
                    continue;
                }
                let ratio = self.reduced[j].abs() / a.abs();
                let better = match best {
                    None => true,
                    Some((_, best_ratio, best_a)) => {
                        let slack = 1e-12 * best_ratio.max(1e-12);
                        ratio < best_ratio - slack || (ratio <= best_ratio + slack && a.abs() > best_a)
                    }
                };
                if better {
                    best = Some((j, ratio, a.abs()));
                }
            }
            let Some((q, _, _)) = best else {
                return Err(Error::Lp("infeasible"));
            };
            let leave_var = self.basis[r];
            self.pivot(r, q);
            self.at_upper[leave_var] = to_upper;
            self.at_upper[q] = false;
            // keep reduced costs sign-consistent with the bound they sit at
            let d = self.reduced[leave_var];
            self.reduced[leave_var] = if to_upper { d.min(0.0) } else { d.max(0.0) };
        }
    }

    fn solution(&self) -> LpSolution {
        let values = self.basic_values();
        let x: Vec<f64> = (0..self.n_struct)
            .map(|j| match self.basic_row[j] {
                Some(k) => values[k].clamp(self.lower[j], self.upper[j]),
                None => self.nonbasic_value(j),
            })
            .collect();
        let objective = x.iter().zip(&self.cost).map(|(x, c)| x * c).sum();
        LpSolution {
            x,
            objective,
            pivots: self.pivots,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn bounds_only() {
        let mut lp = DualSimplex::new(vec![1.0, -2.0], vec![0.0, -1.0], vec![3.0, 4.0]).unwrap();
        let sol = lp.solve().unwrap();
        assert_eq!(sol.x, vec![0.0, 4.0]);
        assert_eq!(sol.objective, -8.0);
    }

    #[test]
    fn two_variable_covering() {
        // min x + 2y  s.t. x + y >= 3, x - y <= 1, 0 <= x, y <= 10
        let mut lp = DualSimplex::new(vec![1.0, 2.0], vec![0.0; 2], vec![10.0; 2]).unwrap();
        lp.add_row(&[1.0, 1.0], 3.0, f64::INFINITY).unwrap();
        lp.add_row(&[1.0, -1.0], f64::NEG_INFINITY, 1.0).unwrap();
        let sol = lp.solve().unwrap();
        assert_abs_diff_eq!(sol.x[0], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.x[1], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.objective, 4.0, epsilon = 1e-12);
    }

    #[test]
    fn rows_added_after_solve() {
        let mut lp = DualSimplex::new(vec![1.0, 1.0], vec![0.0; 2], vec![5.0; 2]).unwrap();
        lp.add_row(&[1.0, 0.0], 1.0, f64::INFINITY).unwrap();
        assert_abs_diff_eq!(lp.solve().unwrap().objective, 1.0, epsilon = 1e-12);
        lp.add_row(&[1.0, 2.0], 4.0, f64::INFINITY).unwrap();
        let sol = lp.solve().unwrap();
        // x = 1, y = 1.5 beats x = 4, y = 0
        assert_abs_diff_eq!(sol.objective, 2.5, epsilon = 1e-12);
        lp.add_row(&[0.0, 1.0], f64::NEG_INFINITY, 1.0).unwrap();
        let sol = lp.solve().unwrap();
        assert_abs_diff_eq!(sol.x[0], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.x[1], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn equality_rows() {
        // min -u + 0.5 w  s.t. u + w = 1, u <= 3 w
        let mut lp = DualSimplex::new(vec![-1.0, 0.5], vec![0.0; 2], vec![1.0; 2]).unwrap();
        lp.add_row(&[1.0, 1.0], 1.0, 1.0).unwrap();
        lp.add_row(&[-1.0, 3.0], 0.0, f64::INFINITY).unwrap();
        let sol = lp.solve().unwrap();
        assert_abs_diff_eq!(sol.x[0], 0.75, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.x[1], 0.25, epsilon = 1e-12);
    }

    #[test]
    fn infeasible_detected() {
        let mut lp = DualSimplex::new(vec![1.0], vec![0.0], vec![1.0]).unwrap();
        lp.add_row(&[1.0], 2.0, f64::INFINITY).unwrap();
        assert!(matches!(lp.solve(), Err(Error::Lp("infeasible"))));
    }

    #[test]
    fn rejects_unbounded_variables() {
        assert!(DualSimplex::new(vec![1.0], vec![0.0], vec![f64::INFINITY]).is_err());
        assert!(DualSimplex::new(vec![1.0], vec![1.0], vec![0.0]).is_err());
    }

    /// Enumerates every vertex of a 2-variable box-and-rows polytope.
    fn brute_force(cost: [f64; 2], rows: &[([f64; 2], f64)], bound: f64) -> Option<f64> {
        let mut lines: Vec<([f64; 2], f64)> = rows.to_vec();
        lines.push(([1.0, 0.0], 0.0));
        lines.push(([1.0, 0.0], bound));
        lines.push(([0.0, 1.0], 0.0));
        lines.push(([0.0, 1.0], bound));
        let mut best: Option<f64> = None;
        for i in 0..lines.len() {
            for j in i + 1..lines.len() {
                let ([a, b], e) = lines[i];
                let ([c, d], f) = lines[j];
                let det = a * d - b * c;
                if det.abs() < 1e-9 {
                    continue;
                }
                let x = (e * d - b * f) / det;
                let y = (a * f - e * c) / det;
                let inside = x >= -1e-9
                    && y >= -1e-9
                    && x <= bound + 1e-9
                    && y <= bound + 1e-9
                    && rows.iter().all(|([p, q], h)| p * x + q * y >= h - 1e-9);
                if inside {
                    let value = cost[0] * x + cost[1] * y;
                    best = Some(best.map_or(value, |b: f64| b.min(value)));
                }
            }
        }
        best
    }

    proptest! {
        #[test]
        fn matches_vertex_enumeration(
            cost in proptest::array::uniform2(-2.0..2.0f64),
            rows in proptest::collection::vec((proptest::array::uniform2(-1.0..1.0f64), -1.0..2.0f64), 1..6),
        ) {
            let bound = 4.0;
            let mut lp = DualSimplex::new(cost.to_vec(), vec![0.0; 2], vec![bound; 2]).unwrap();
            for (a, h) in &rows {
                lp.add_row(a, *h, f64::INFINITY).unwrap();
            }
            match (lp.solve(), brute_force(cost, &rows, bound)) {
                (Ok(sol), Some(best)) => prop_assert!((sol.objective - best).abs() <= 1e-7, "{} vs {}", sol.objective, best),
                (Err(Error::Lp("infeasible")), None) => {}
                (got, want) => prop_assert!(false, "solver {got:?} vs enumeration {want:?}"),
            }
        }
    }
}
