//! Linear programs in inequality form and their simplex solver.
//!
//! Every program here is `min c·x` subject to rows `a·x <= b` and finite
//! lower bounds `x >= l >= 0` (upper bounds optional). The solver returns a
//! basic optimal solution together with row duals and reduced costs.

mod simplex;

pub use simplex::{solve, solve_warm, solve_with, SimplexOptions};

use crate::error::LpError;

/// Primal feasibility tolerance.
pub const FEASIBILITY_TOL: f64 = 1e-9;
/// Tolerance on complementary slackness products and dual signs.
pub const SLACKNESS_TOL: f64 = 1e-7;
/// Allowed gap between primal and dual objective values.
pub const DUALITY_GAP_TOL: f64 = 1e-6;

/// One `entries · x <= rhs` constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub entries: Vec<(usize, f64)>,
    pub rhs: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinearProgram {
    objective: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    rows: Vec<Row>,
}

impl LinearProgram {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a variable with bounds `[lower, upper]`; `upper` may be infinite.
    pub fn add_variable(&mut self, cost: f64, lower: f64, upper: f64) -> usize {
        self.objective.push(cost);
        self.lower.push(lower);
        self.upper.push(upper);
        self.objective.len() - 1
    }

    pub fn add_row(&mut self, entries: Vec<(usize, f64)>, rhs: f64) -> usize {
        self.rows.push(Row { entries, rhs });
        self.rows.len() - 1
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) {
        self.lower[var] = lower;
        self.upper[var] = upper;
    }

    pub fn n_variables(&self) -> usize {
        self.objective.len()
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn bounds(&self, var: usize) -> (f64, f64) {
        (self.lower[var], self.upper[var])
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn validate(&self) -> Result<(), LpError> {
        let n = self.n_variables();
        for (j, &c) in self.objective.iter().enumerate() {
            if !c.is_finite() {
                return Err(LpError::Malformed(format!("objective of variable {j} is not finite")));
            }
            let (lo, hi) = (self.lower[j], self.upper[j]);
            if !lo.is_finite() || lo < 0.0 {
                return Err(LpError::Malformed(format!("variable {j} needs a finite lower bound >= 0")));
            }
            if hi.is_nan() || hi < lo {
                return Err(LpError::Malformed(format!("variable {j} has empty bounds")));
            }
        }
        for (i, row) in self.rows.iter().enumerate() {
            if !row.rhs.is_finite() {
                return Err(LpError::Malformed(format!("row {i} has a non-finite right-hand side")));
            }
            for &(j, a) in &row.entries {
                if j >= n || !a.is_finite() {
                    return Err(LpError::Malformed(format!("row {i} has a bad entry on variable {j}")));
                }
            }
        }
        Ok(())
    }

    /// `rhs - a·x` for every row.
    pub fn slacks(&self, x: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| r.rhs - r.entries.iter().map(|&(j, a)| a * x[j]).sum::<f64>())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub primal: Vec<f64>,
    /// One value per row; non-positive for `<=` rows of a minimization.
    pub dual: Vec<f64>,
    /// `c_j - y·A_j` for every variable.
    pub reduced_costs: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
    /// Basic variables at termination; `n + i` is the slack of row `i`.
    pub basis: Vec<usize>,
}

impl LpSolution {
    /// `y·b` plus the bound terms of the nonbasic variables.
    pub fn dual_objective(&self, lp: &LinearProgram) -> f64 {
        let rows: f64 = lp.rows().iter().zip(&self.dual).map(|(r, y)| r.rhs * y).sum();
        let bounds: f64 = self
            .reduced_costs
            .iter()
            .enumerate()
            .map(|(j, &d)| {
                let (lo, hi) = lp.bounds(j);
                if d > 0.0 {
                    d * lo
                } else if hi.is_finite() {
                    d * hi
                } else {
                    0.0
                }
            })
            .sum();
        rows + bounds
    }

    /// Checks primal feasibility, dual sign conditions, complementary
    /// slackness and the duality gap. Returns a description of the first
    /// failure.
    pub fn certify(&self, lp: &LinearProgram) -> Result<(), String> {
        let scale = |v: f64| 1.0 + v.abs();
        for (j, &x) in self.primal.iter().enumerate() {
            let (lo, hi) = lp.bounds(j);
            if x < lo - FEASIBILITY_TOL * scale(lo) || x > hi + FEASIBILITY_TOL * scale(hi) {
                return Err(format!("variable {j} = {x} outside [{lo}, {hi}]"));
            }
            let d = self.reduced_costs[j];
            let from_lo = x - lo;
            let from_hi = hi - x;
            let gap = from_lo.min(from_hi).max(0.0);
            if (d * gap).abs() > SLACKNESS_TOL * scale(d) {
                return Err(format!("variable {j}: reduced cost {d} with distance {gap} from bounds"));
            }
            if d < -SLACKNESS_TOL && from_hi > SLACKNESS_TOL {
                return Err(format!("variable {j}: negative reduced cost {d} below upper bound"));
            }
            if d > SLACKNESS_TOL && from_lo > SLACKNESS_TOL {
                return Err(format!("variable {j}: positive reduced cost {d} above lower bound"));
            }
        }
        for (i, (s, &y)) in lp.slacks(&self.primal).into_iter().zip(&self.dual).enumerate() {
            if s < -FEASIBILITY_TOL * scale(lp.rows()[i].rhs) * 10.0 {
                return Err(format!("row {i} violated by {}", -s));
            }
            if y > SLACKNESS_TOL {
                return Err(format!("row {i} has positive dual {y}"));
            }
            if (y * s).abs() > SLACKNESS_TOL * scale(y) {
                return Err(format!("row {i}: dual {y} on slack {s}"));
            }
        }
        let dual_obj = self.dual_objective(lp);
        if (dual_obj - self.objective).abs() > DUALITY_GAP_TOL * scale(self.objective) {
            return Err(format!("duality gap: primal {} dual {}", self.objective, dual_obj));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_variable() {
        let mut lp = LinearProgram::new();
        let x = lp.add_variable(-1.0, 0.0, f64::INFINITY);
        lp.add_row(vec![(x, 1.0)], 1.0);
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.primal, vec![1.0]);
        assert_eq!(sol.objective, -1.0);
        assert_eq!(sol.dual, vec![-1.0]);
        sol.certify(&lp).unwrap();
    }

    #[test]
    fn d3_row_of_the_golden_pool() {
        let mut lp = LinearProgram::new();
        let g1 = lp.add_variable(-600.0, 0.0, f64::INFINITY);
        let g2 = lp.add_variable(-204.0, 0.0, f64::INFINITY);
        lp.add_row(vec![(g1, 1.0), (g2, 1.0)], 1.0);
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.objective, -600.0);
        assert_eq!(sol.primal, vec![1.0, 0.0]);
        sol.certify(&lp).unwrap();
    }

    #[test]
    fn empty_program() {
        let sol = solve(&LinearProgram::new()).unwrap();
        assert_eq!(sol.objective, 0.0);
        assert!(sol.primal.is_empty() && sol.dual.is_empty());
    }

    #[test]
    fn upper_bounds_without_rows() {
        let mut lp = LinearProgram::new();
        lp.add_variable(-2.0, 0.0, 3.0);
        lp.add_variable(5.0, 1.0, 4.0);
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.primal, vec![3.0, 1.0]);
        assert_eq!(sol.objective, -1.0);
        sol.certify(&lp).unwrap();
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new();
        let x = lp.add_variable(0.0, 0.0, f64::INFINITY);
        lp.add_row(vec![(x, -1.0)], -2.0);
        lp.add_row(vec![(x, 1.0)], 1.0);
        assert_eq!(solve(&lp), Err(LpError::Infeasible));

        let mut lp = LinearProgram::new();
        let x = lp.add_variable(-1.0, 0.0, f64::INFINITY);
        let y = lp.add_variable(0.0, 0.0, f64::INFINITY);
        lp.add_row(vec![(x, 1.0), (y, -1.0)], 1.0);
        assert_eq!(solve(&lp), Err(LpError::Unbounded));
    }

    #[test]
    fn malformed_programs() {
        let mut lp = LinearProgram::new();
        lp.add_variable(f64::NAN, 0.0, 1.0);
        assert!(matches!(solve(&lp), Err(LpError::Malformed(_))));

        let mut lp = LinearProgram::new();
        lp.add_variable(1.0, 0.0, 1.0);
        lp.add_row(vec![(3, 1.0)], 1.0);
        assert!(matches!(solve(&lp), Err(LpError::Malformed(_))));

        let mut lp = LinearProgram::new();
        lp.add_variable(1.0, 2.0, 1.0);
        assert!(matches!(solve(&lp), Err(LpError::Malformed(_))));
    }

    #[test]
    fn pivot_limit() {
        let mut lp = LinearProgram::new();
        let x = lp.add_variable(-1.0, 0.0, f64::INFINITY);
        let y = lp.add_variable(-1.0, 0.0, f64::INFINITY);
        lp.add_row(vec![(x, 1.0), (y, 2.0)], 4.0);
        lp.add_row(vec![(x, 3.0), (y, 1.0)], 6.0);
        let opts = SimplexOptions { max_pivots: 0 };
        assert_eq!(solve_with(&lp, &opts), Err(LpError::IterationLimit(0)));
    }

    fn random_packing(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> LinearProgram {
        let mut lp = LinearProgram::new();
        let mut entries = vec![Vec::new(); rows];
        for _ in 0..cols {
            let j = lp.add_variable(-rng.gen_range(0.0..10.0_f64).round(), 0.0, f64::INFINITY);
            for (i, row) in entries.iter_mut().enumerate() {
                if rng.gen_bool(0.3) || i == j % rows {
                    row.push((j, 1.0));
                }
            }
        }
        for row in entries {
            lp.add_row(row, 1.0);
        }
        lp
    }

    fn random_general(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> LinearProgram {
        let mut lp = LinearProgram::new();
        for _ in 0..cols {
            let hi = if rng.gen_bool(0.3) { rng.gen_range(1.0..5.0) } else { f64::INFINITY };
            lp.add_variable(rng.gen_range(-5.0..3.0), 0.0, hi);
        }
        for _ in 0..rows {
            let mut entries = Vec::new();
            for j in 0..cols {
                if rng.gen_bool(0.5) {
                    entries.push((j, rng.gen_range(0.1..4.0)));
                }
            }
            lp.add_row(entries, rng.gen_range(1.0..10.0));
        }
        // Keep every variable bounded through some row or its own bound.
        let cover = (0..cols).map(|j| (j, 1.0)).collect();
        lp.add_row(cover, 20.0);
        lp
    }

    #[test]
    fn random_packings_certify() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let rows = rng.gen_range(1..12);
            let cols = rng.gen_range(1..30);
            let lp = random_packing(&mut rng, rows, cols);
            let sol = solve(&lp).unwrap();
            sol.certify(&lp).unwrap_or_else(|e| panic!("{e}"));
        }
    }

    #[test]
    fn random_general_programs_certify() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let rows = rng.gen_range(1..10);
            let cols = rng.gen_range(1..15);
            let lp = random_general(&mut rng, rows, cols);
            let sol = solve(&lp).unwrap();
            sol.certify(&lp).unwrap_or_else(|e| panic!("{e}"));
            assert!((sol.dual_objective(&lp) - sol.objective).abs() <= DUALITY_GAP_TOL * (1.0 + sol.objective.abs()));
        }
    }

    #[test]
    fn warm_starts() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let rows = rng.gen_range(1..12);
            let cols = rng.gen_range(1..30);
            let mut lp = random_packing(&mut rng, rows, cols);
            let cold = solve(&lp).unwrap();
            let again = solve_warm(&lp, &cold.basis).unwrap();
            assert_eq!(again.pivots, 0);
            assert!((again.objective - cold.objective).abs() < 1e-9);

            // Appending a column keeps the old basis feasible.
            let j = lp.add_variable(-rng.gen_range(0.0..5.0), 0.0, f64::INFINITY);
            let r = rng.gen_range(0..rows);
            let mut entries = lp.rows[r].entries.clone();
            entries.push((j, 1.0));
            lp.rows[r].entries = entries;
            let shifted: Vec<usize> = cold.basis.iter().map(|&b| if b >= cols { b + 1 } else { b }).collect();
            let warm = solve_warm(&lp, &shifted).unwrap();
            warm.certify(&lp).unwrap_or_else(|e| panic!("{e}"));
            assert!((warm.objective - solve(&lp).unwrap().objective).abs() < 1e-7);

            // Junk hints fall back to a cold start.
            let junk: Vec<usize> = (0..rows + cols + 1).rev().collect();
            let fallback = solve_warm(&lp, &junk).unwrap();
            assert!((fallback.objective - warm.objective).abs() < 1e-7);
        }
    }

    #[test]
    fn repeated_solves_are_identical() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let lp = random_packing(&mut rng, 8, 25);
        let a = solve(&lp).unwrap();
        let b = solve(&lp.clone()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn certify_catches_bad_duals() {
        let mut lp = LinearProgram::new();
        let x = lp.add_variable(-1.0, 0.0, f64::INFINITY);
        lp.add_row(vec![(x, 1.0)], 1.0);
        let mut sol = solve(&lp).unwrap();
        sol.dual[0] = -0.5;
        assert!(sol.certify(&lp).is_err());
    }
}
