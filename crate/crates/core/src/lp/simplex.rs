//! Bounded-variable primal simplex, two phases, with the basis inverse kept
//! in product form and rebuilt periodically.

#![allow(clippy::needless_range_loop)]

use super::{LinearProgram, LpSolution, FEASIBILITY_TOL};
use crate::error::LpError;

const OPTIMALITY_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-9;
const DROP_TOL: f64 = 1e-14;
const REFACTOR_EVERY: usize = 128;
const DEGENERATE_STREAK: usize = 50;

#[derive(Debug, Clone)]
pub struct SimplexOptions {
    pub max_pivots: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions { max_pivots: 1_000_000 }
    }
}

pub fn solve(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    solve_with(lp, &SimplexOptions::default())
}

pub fn solve_with(lp: &LinearProgram, options: &SimplexOptions) -> Result<LpSolution, LpError> {
    lp.validate()?;
    Simplex::new(lp, options.max_pivots).run()
}

/// Starts from `basis` (variable indices, `n + i` for the slack of row `i`)
/// when it is primal feasible, from the slack basis otherwise.
pub fn solve_warm(lp: &LinearProgram, basis: &[usize]) -> Result<LpSolution, LpError> {
    lp.validate()?;
    let options = SimplexOptions::default();
    let mut warm = Simplex::new(lp, options.max_pivots);
    if warm.crash(basis) {
        warm.run()
    } else {
        Simplex::new(lp, options.max_pivots).run()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum State {
    Basic,
    AtLower,
    AtUpper,
}

/// Elementary transformation replacing basis position `pos`.
struct Eta {
    pos: usize,
    pivot_inv: f64,
    /// `-alpha_i / alpha_pos` for `i != pos`.
    entries: Vec<(usize, f64)>,
}

struct Simplex {
    m: usize,
    n_struct: usize,
    // Structural columns in compressed form.
    col_start: Vec<usize>,
    col_row: Vec<usize>,
    col_val: Vec<f64>,
    /// Row of each artificial variable; its column is `-e_row`.
    art_row: Vec<usize>,
    rhs: Vec<f64>,
    struct_cost: Vec<f64>,
    cost: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    x: Vec<f64>,
    state: Vec<State>,
    head: Vec<usize>,
    etas: Vec<Eta>,
    /// Length of `etas` right after the last reinversion.
    factor_len: usize,
    pivots: usize,
    max_pivots: usize,
    bland: bool,
    degenerate: usize,
}

impl Simplex {
    fn new(lp: &LinearProgram, max_pivots: usize) -> Self {
        let m = lp.n_rows();
        let n = lp.n_variables();
        let mut counts = vec![0usize; n + 1];
        for row in lp.rows() {
            for &(j, _) in &row.entries {
                counts[j + 1] += 1;
            }
        }
        for j in 0..n {
            counts[j + 1] += counts[j];
        }
        let col_start = counts.clone();
        let mut fill = counts;
        let nnz = col_start[n];
        let mut col_row = vec![0; nnz];
        let mut col_val = vec![0.0; nnz];
        for (i, row) in lp.rows().iter().enumerate() {
            for &(j, a) in &row.entries {
                let k = fill[j];
                col_row[k] = i;
                col_val[k] = a;
                fill[j] += 1;
            }
        }

        let mut lower = Vec::with_capacity(n + 2 * m);
        let mut upper = Vec::with_capacity(n + 2 * m);
        let mut x = Vec::with_capacity(n + 2 * m);
        let mut state = Vec::with_capacity(n + 2 * m);
        for j in 0..n {
            let (lo, hi) = lp.bounds(j);
            lower.push(lo);
            upper.push(hi);
            x.push(lo);
            state.push(State::AtLower);
        }
        let rhs: Vec<f64> = lp.rows().iter().map(|r| r.rhs).collect();
        let mut residual = rhs.clone();
        for j in 0..n {
            if x[j] != 0.0 {
                for k in col_start[j]..col_start[j + 1] {
                    residual[col_row[k]] -= col_val[k] * x[j];
                }
            }
        }
        for _ in 0..m {
            lower.push(0.0);
            upper.push(f64::INFINITY);
            x.push(0.0);
            state.push(State::AtLower);
        }
        let mut art_row = Vec::new();
        let mut head = vec![0; m];
        for i in 0..m {
            if residual[i] >= 0.0 {
                head[i] = n + i;
                x[n + i] = residual[i];
                state[n + i] = State::Basic;
            } else {
                art_row.push(i);
                let a = n + m + art_row.len() - 1;
                lower.push(0.0);
                upper.push(f64::INFINITY);
                x.push(-residual[i]);
                state.push(State::Basic);
                head[i] = a;
            }
        }

        let total = x.len();
        let mut s = Simplex {
            m,
            n_struct: n,
            col_start,
            col_row,
            col_val,
            art_row,
            rhs,
            struct_cost: lp.objective().to_vec(),
            cost: vec![0.0; total],
            lower,
            upper,
            x,
            state,
            head,
            etas: Vec::new(),
            factor_len: 0,
            pivots: 0,
            max_pivots,
            bland: false,
            degenerate: 0,
        };
        // Artificial columns are -e_i, so the starting basis is not the
        // identity; one eta per artificial fixes that.
        for p in 0..m {
            if s.head[p] >= n + m {
                s.etas.push(Eta {
                    pos: p,
                    pivot_inv: -1.0,
                    entries: Vec::new(),
                });
            }
        }
        s
    }

    /// Installs the columns of `basis`, filling gaps with slacks. False when
    /// the result is not primal feasible.
    fn crash(&mut self, basis: &[usize]) -> bool {
        let (n, m) = (self.n_struct, self.m);
        if !self.art_row.is_empty() {
            return false;
        }
        let mut head: Vec<usize> = Vec::with_capacity(m);
        let mut seen = vec![false; n + m];
        for &j in basis {
            if j < n + m && !seen[j] && head.len() < m {
                seen[j] = true;
                head.push(j);
            }
        }
        for j in 0..n + m {
            self.state[j] = if seen[j] { State::Basic } else { State::AtLower };
            self.x[j] = self.lower[j];
        }
        self.head = head;
        self.reinvert();
        self.head.iter().all(|&j| {
            self.x[j] >= self.lower[j] - FEASIBILITY_TOL && self.x[j] <= self.upper[j] + FEASIBILITY_TOL
        })
    }

    fn n_total(&self) -> usize {
        self.x.len()
    }

    fn scatter(&self, j: usize, out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        if j < self.n_struct {
            for k in self.col_start[j]..self.col_start[j + 1] {
                out[self.col_row[k]] = self.col_val[k];
            }
        } else if j < self.n_struct + self.m {
            out[j - self.n_struct] = 1.0;
        } else {
            out[self.art_row[j - self.n_struct - self.m]] = -1.0;
        }
    }

    fn dot(&self, j: usize, y: &[f64]) -> f64 {
        if j < self.n_struct {
            (self.col_start[j]..self.col_start[j + 1])
                .map(|k| self.col_val[k] * y[self.col_row[k]])
                .sum()
        } else if j < self.n_struct + self.m {
            y[j - self.n_struct]
        } else {
            -y[self.art_row[j - self.n_struct - self.m]]
        }
    }

    fn column_len(&self, j: usize) -> usize {
        if j < self.n_struct {
            self.col_start[j + 1] - self.col_start[j]
        } else {
            1
        }
    }

    fn ftran(&self, a: &mut [f64]) {
        for eta in &self.etas {
            let ap = a[eta.pos];
            if ap != 0.0 {
                a[eta.pos] = ap * eta.pivot_inv;
                for &(i, v) in &eta.entries {
                    a[i] += ap * v;
                }
            }
        }
    }

    fn btran(&self, v: &mut [f64]) {
        for eta in self.etas.iter().rev() {
            let mut acc = v[eta.pos] * eta.pivot_inv;
            for &(i, e) in &eta.entries {
                acc += v[i] * e;
            }
            v[eta.pos] = acc;
        }
    }

    fn push_eta(&mut self, pos: usize, alpha: &[f64]) {
        let pivot_inv = 1.0 / alpha[pos];
        let entries = alpha
            .iter()
            .enumerate()
            .filter(|&(i, &a)| i != pos && a.abs() > DROP_TOL)
            .map(|(i, &a)| (i, -a * pivot_inv))
            .collect();
        self.etas.push(Eta { pos, pivot_inv, entries });
    }

    /// Rebuilds the product-form inverse of the current basis from scratch
    /// and recomputes the basic values.
    fn reinvert(&mut self) {
        let m = self.m;
        let n = self.n_struct;
        self.etas.clear();
        // Position p initially holds e_p, i.e. the slack of row p.
        let mut taken = vec![false; m];
        let mut new_head = vec![usize::MAX; m];
        let mut slack_basic = vec![false; m];
        let mut others = Vec::new();
        for &j in &self.head {
            if j >= n && j < n + m {
                slack_basic[j - n] = true;
            } else {
                others.push(j);
            }
        }
        others.sort_by_key(|&j| (self.column_len(j), j));
        let mut alpha = vec![0.0; m];
        let mut dropped = Vec::new();
        for j in others {
            self.scatter(j, &mut alpha);
            self.ftran(&mut alpha);
            let pick = |prefer_free_slack: bool| {
                let mut best: Option<(usize, f64)> = None;
                for p in 0..m {
                    if taken[p] || (prefer_free_slack && slack_basic[p]) {
                        continue;
                    }
                    let v = alpha[p].abs();
                    if v > 1e-7 && best.is_none_or(|(_, b)| v > b) {
                        best = Some((p, v));
                    }
                }
                best.map(|(p, _)| p)
            };
            match pick(true).or_else(|| pick(false)) {
                Some(p) => {
                    self.push_eta(p, &alpha);
                    taken[p] = true;
                    new_head[p] = j;
                }
                None => dropped.push(j),
            }
        }
        for i in 0..m {
            if !slack_basic[i] {
                continue;
            }
            let j = n + i;
            if !taken[i] {
                taken[i] = true;
                new_head[i] = j;
                continue;
            }
            self.scatter(j, &mut alpha);
            self.ftran(&mut alpha);
            let mut best: Option<(usize, f64)> = None;
            for p in 0..m {
                let v = alpha[p].abs();
                if !taken[p] && v > 1e-7 && best.is_none_or(|(_, b)| v > b) {
                    best = Some((p, v));
                }
            }
            match best {
                Some((p, _)) => {
                    self.push_eta(p, &alpha);
                    taken[p] = true;
                    new_head[p] = j;
                }
                None => dropped.push(j),
            }
        }
        for j in dropped {
            self.state[j] = State::AtLower;
            self.x[j] = self.lower[j];
        }
        for p in 0..m {
            if !taken[p] {
                // Still e_p: the slack of row p replaces a dependent column.
                new_head[p] = n + p;
                self.state[n + p] = State::Basic;
            }
        }
        self.head = new_head;
        self.factor_len = self.etas.len();
        self.recompute_basics();
    }

    fn recompute_basics(&mut self) {
        let mut r = self.rhs.clone();
        for j in 0..self.n_total() {
            if self.state[j] == State::Basic || self.x[j] == 0.0 {
                continue;
            }
            let xj = self.x[j];
            if j < self.n_struct {
                for k in self.col_start[j]..self.col_start[j + 1] {
                    r[self.col_row[k]] -= self.col_val[k] * xj;
                }
            } else if j < self.n_struct + self.m {
                r[j - self.n_struct] -= xj;
            } else {
                r[self.art_row[j - self.n_struct - self.m]] += xj;
            }
        }
        self.ftran(&mut r);
        for p in 0..self.m {
            self.x[self.head[p]] = r[p];
        }
    }

    fn duals(&self) -> Vec<f64> {
        let mut y: Vec<f64> = self.head.iter().map(|&j| self.cost[j]).collect();
        self.btran(&mut y);
        y
    }

    /// Entering variable and its direction (+1 up from lower, -1 down from
    /// upper), or `None` at optimality.
    fn choose_entering(&self, y: &[f64]) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64, f64)> = None;
        for j in 0..self.n_total() {
            let st = self.state[j];
            if st == State::Basic || self.lower[j] == self.upper[j] {
                continue;
            }
            let d = self.cost[j] - self.dot(j, y);
            let dir = match st {
                State::AtLower if d < -OPTIMALITY_TOL => 1.0,
                State::AtUpper if d > OPTIMALITY_TOL => -1.0,
                _ => continue,
            };
            if self.bland {
                return Some((j, dir));
            }
            if best.is_none_or(|(_, _, b)| d.abs() > b) {
                best = Some((j, dir, d.abs()));
            }
        }
        best.map(|(j, dir, _)| (j, dir))
    }

    /// Runs simplex iterations on the current cost vector until optimal.
    fn iterate(&mut self) -> Result<(), LpError> {
        let m = self.m;
        let mut alpha = vec![0.0; m];
        let mut fresh = false;
        loop {
            if self.etas.len() >= self.factor_len + REFACTOR_EVERY {
                self.reinvert();
                fresh = true;
            }
            let y = self.duals();
            let Some((q, dir)) = self.choose_entering(&y) else {
                if fresh {
                    return Ok(());
                }
                // Confirm optimality on a freshly factored basis.
                self.reinvert();
                fresh = true;
                continue;
            };
            if self.pivots >= self.max_pivots {
                return Err(LpError::IterationLimit(self.pivots));
            }
            self.pivots += 1;
            fresh = false;

            self.scatter(q, &mut alpha);
            self.ftran(&mut alpha);

            // Ratio test. Basic value at position p moves by -dir * alpha_p
            // per unit step of the entering variable.
            let mut step = f64::INFINITY;
            let mut leave: Option<(usize, bool)> = None;
            let mut leave_mag = 0.0;
            for p in 0..m {
                let delta = -dir * alpha[p];
                if delta.abs() <= PIVOT_TOL {
                    continue;
                }
                let j = self.head[p];
                let (ratio, to_upper) = if delta < 0.0 {
                    (((self.x[j] - self.lower[j]) / -delta).max(0.0), false)
                } else if self.upper[j].is_finite() {
                    (((self.upper[j] - self.x[j]) / delta).max(0.0), true)
                } else {
                    continue;
                };
                let better = if ratio < step - 1e-12 {
                    true
                } else if ratio <= step + 1e-12 {
                    match leave {
                        Some((lp, _)) if self.bland => j < self.head[lp],
                        _ => delta.abs() > leave_mag,
                    }
                } else {
                    false
                };
                if better {
                    step = step.min(ratio);
                    leave = Some((p, to_upper));
                    leave_mag = delta.abs();
                }
            }
            let flip = self.upper[q] - self.lower[q];
            if flip.is_finite() && flip <= step {
                // Bound flip: the entering variable reaches its other bound.
                for p in 0..m {
                    if alpha[p] != 0.0 {
                        let j = self.head[p];
                        self.x[j] -= dir * alpha[p] * flip;
                    }
                }
                if dir > 0.0 {
                    self.x[q] = self.upper[q];
                    self.state[q] = State::AtUpper;
                } else {
                    self.x[q] = self.lower[q];
                    self.state[q] = State::AtLower;
                }
                self.degenerate = 0;
                self.bland = false;
                continue;
            }
            let Some((r, to_upper)) = leave else {
                return Err(LpError::Unbounded);
            };
            for p in 0..m {
                if alpha[p] != 0.0 {
                    let j = self.head[p];
                    self.x[j] -= dir * alpha[p] * step;
                }
            }
            self.x[q] += dir * step;
            let out = self.head[r];
            if to_upper {
                self.x[out] = self.upper[out];
                self.state[out] = State::AtUpper;
            } else {
                self.x[out] = self.lower[out];
                self.state[out] = State::AtLower;
            }
            self.state[q] = State::Basic;
            self.head[r] = q;
            self.push_eta(r, &alpha);

            if step <= 1e-12 {
                self.degenerate += 1;
                if self.degenerate > DEGENERATE_STREAK {
                    self.bland = true;
                }
            } else {
                self.degenerate = 0;
                self.bland = false;
            }
        }
    }

    fn run(mut self) -> Result<LpSolution, LpError> {
        let n = self.n_struct;
        let m = self.m;
        if !self.art_row.is_empty() {
            for j in n + m..self.n_total() {
                self.cost[j] = 1.0;
            }
            self.iterate()?;
            let infeasibility: f64 = (n + m..self.n_total()).map(|j| self.x[j].max(0.0)).sum();
            let scale = 1.0 + self.rhs.iter().fold(0.0f64, |a, b| a.max(b.abs()));
            if infeasibility > FEASIBILITY_TOL * 100.0 * scale {
                return Err(LpError::Infeasible);
            }
            for j in n + m..self.n_total() {
                self.cost[j] = 0.0;
                self.upper[j] = 0.0;
                if self.state[j] != State::Basic {
                    self.x[j] = 0.0;
                    self.state[j] = State::AtLower;
                }
            }
            self.bland = false;
            self.degenerate = 0;
        }
        self.cost[..n].copy_from_slice(&self.struct_cost);
        self.iterate()?;

        let y = self.duals();
        let primal: Vec<f64> = self.x[..n].to_vec();
        let reduced_costs: Vec<f64> = (0..n)
            .map(|j| {
                if self.state[j] == State::Basic {
                    0.0
                } else {
                    self.cost[j] - self.dot(j, &y)
                }
            })
            .collect();
        let objective = (0..n).map(|j| self.cost[j] * primal[j]).sum::<f64>() + 0.0;
        let basis = self.head.iter().copied().filter(|&j| j < n + m).collect();
        Ok(LpSolution {
            basis,
            primal,
            dual: y,
            reduced_costs,
            objective,
            pivots: self.pivots,
        })
    }
}
