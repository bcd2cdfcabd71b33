//! Correlation-clustering view of a packing: edge variables, the triangle
//! and odd-wheel inequalities, and a small LP over them used to compare
//! relaxation strength against column generation.

use std::collections::HashMap;

use serde::Serialize;

use crate::colgen::{run_cg, CgConfig};
use crate::error::SolverError;
use crate::instance::{Column, Instance, ObsId};
use crate::lp::{self, LinearProgram};
use crate::master::{DoiConfig, DoiMode};
use crate::pricing::PricingConfig;

/// Tolerance used by all checkers.
pub const CHECK_TOL: f64 = 1e-9;

/// Largest instance `solve_cc_lp` accepts.
pub const CC_LP_MAX_OBSERVATIONS: usize = 10;

/// Symmetric co-clustering values `f[a][b]`, defined for every pair.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeVariables {
    n: usize,
    f: Vec<f64>,
}

impl EdgeVariables {
    pub fn zeros(n: usize) -> Self {
        EdgeVariables { n, f: vec![0.0; n * n] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, a: ObsId, b: ObsId) -> f64 {
        self.f[a * self.n + b]
    }

    pub fn set(&mut self, a: ObsId, b: ObsId, value: f64) {
        self.f[a * self.n + b] = value;
        self.f[b * self.n + a] = value;
    }
}

/// `f_ab = sum of gamma_g over columns holding both a and b`.
pub fn gamma_to_f(n: usize, columns: &[Column], gamma: &[f64]) -> EdgeVariables {
    let mut f = EdgeVariables::zeros(n);
    for (col, &g) in columns.iter().zip(gamma) {
        if g == 0.0 {
            continue;
        }
        let m = col.members();
        for (i, &a) in m.iter().enumerate() {
            for &b in &m[i + 1..] {
                let v = f.get(a, b) + g;
                f.set(a, b, v);
            }
        }
    }
    f
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Violation {
    Bound { a: ObsId, b: ObsId, value: f64 },
    /// `f_13 + f_23 - f_12 > 1`.
    Cycle { d1: ObsId, d2: ObsId, d3: ObsId, excess: f64 },
    Wheel { hub: ObsId, rim: Vec<ObsId>, excess: f64 },
}

pub fn check_bounds(f: &EdgeVariables) -> Vec<Violation> {
    let mut out = Vec::new();
    for a in 0..f.n {
        for b in a + 1..f.n {
            let value = f.get(a, b);
            if !(-CHECK_TOL..=1.0 + CHECK_TOL).contains(&value) {
                out.push(Violation::Bound { a, b, value });
            }
        }
    }
    out
}

/// Triangle inequalities over every triple, in all three orientations.
pub fn check_cycle_inequalities(f: &EdgeVariables) -> Vec<Violation> {
    let mut out = Vec::new();
    for (d1, d2, d3) in oriented_triangles(f.n) {
        let excess = f.get(d1, d3) + f.get(d2, d3) - f.get(d1, d2) - 1.0;
        if excess > CHECK_TOL {
            out.push(Violation::Cycle { d1, d2, d3, excess });
        }
    }
    out
}

/// Odd-wheel inequalities for every hub and every rim of length 3 up to
/// `max_rim` (odd lengths only).
pub fn check_odd_wheels(f: &EdgeVariables, max_rim: usize) -> Vec<Violation> {
    let mut out = Vec::new();
    for len in (3..=max_rim).step_by(2) {
        for hub in 0..f.n {
            for rim in rims(f.n, hub, len) {
                let excess = wheel_lhs(f, hub, &rim) - (len / 2) as f64;
                if excess > CHECK_TOL {
                    out.push(Violation::Wheel { hub, rim, excess });
                }
            }
        }
    }
    out
}

fn wheel_lhs(f: &EdgeVariables, hub: ObsId, rim: &[ObsId]) -> f64 {
    let len = rim.len();
    (0..len)
        .map(|m| f.get(rim[m], hub) - f.get(rim[m], rim[(m + 1) % len]))
        .sum()
}

/// `(d1, d2, d3)` with `d1 < d2` and `d3` any third node.
fn oriented_triangles(n: usize) -> impl Iterator<Item = (ObsId, ObsId, ObsId)> {
    (0..n).flat_map(move |d1| {
        (d1 + 1..n).flat_map(move |d2| (0..n).filter(move |&d3| d3 != d1 && d3 != d2).map(move |d3| (d1, d2, d3)))
    })
}

/// Cycles of `len` distinct nodes avoiding `hub`, one per undirected cycle:
/// the smallest node comes first and the second node is below the last.
fn rims(n: usize, hub: ObsId, len: usize) -> Vec<Vec<ObsId>> {
    fn extend(n: usize, hub: ObsId, len: usize, path: &mut Vec<ObsId>, out: &mut Vec<Vec<ObsId>>) {
        if path.len() == len {
            if path[1] < path[len - 1] {
                out.push(path.clone());
            }
            return;
        }
        for v in path[0] + 1..n {
            if v != hub && !path.contains(&v) {
                path.push(v);
                extend(n, hub, len, path, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    for start in 0..n {
        if start != hub {
            extend(n, hub, len, &mut vec![start], &mut out);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct CcLpSolution {
    pub objective: f64,
    pub f: EdgeVariables,
    /// Solves needed until no 5-rim wheel was violated.
    pub rounds: usize,
    pub rows: usize,
}

/// Minimizes `sum over ordered pairs of theta f` over `[0,1]` edge variables
/// subject to all triangle inequalities and odd wheels with rims of 3 and 5.
/// Blocked pairs are fixed to zero. 5-rim wheels are added as they are
/// found violated.
pub fn solve_cc_lp(instance: &Instance) -> Result<CcLpSolution, SolverError> {
    let n = instance.n_observations();
    if n > CC_LP_MAX_OBSERVATIONS {
        return Err(SolverError::SizeLimit { size: n, limit: CC_LP_MAX_OBSERVATIONS });
    }
    let mut program = LinearProgram::new();
    let mut var: HashMap<(ObsId, ObsId), usize> = HashMap::new();
    for (a, b, theta) in instance.pairs() {
        let j = program.add_variable(2.0 * theta, 0.0, 1.0);
        var.insert((a.min(b), a.max(b)), j);
    }
    let lookup = |a: ObsId, b: ObsId| var.get(&(a.min(b), a.max(b))).copied();
    let add = |program: &mut LinearProgram, terms: &[(ObsId, ObsId, f64)], rhs: f64| {
        let mut entries: Vec<(usize, f64)> = Vec::new();
        for &(a, b, c) in terms {
            if let Some(j) = lookup(a, b) {
                match entries.iter_mut().find(|e| e.0 == j) {
                    Some(e) => e.1 += c,
                    None => entries.push((j, c)),
                }
            }
        }
        entries.retain(|e| e.1 != 0.0);
        if !entries.is_empty() {
            program.add_row(entries, rhs);
        }
    };
    for (d1, d2, d3) in oriented_triangles(n) {
        add(&mut program, &[(d1, d3, 1.0), (d2, d3, 1.0), (d1, d2, -1.0)], 1.0);
    }
    let wheel_terms = |hub: ObsId, rim: &[ObsId]| -> Vec<(ObsId, ObsId, f64)> {
        let len = rim.len();
        (0..len)
            .flat_map(|m| [(rim[m], hub, 1.0), (rim[m], rim[(m + 1) % len], -1.0)])
            .collect()
    };
    for hub in 0..n {
        for rim in rims(n, hub, 3) {
            add(&mut program, &wheel_terms(hub, &rim), 1.0);
        }
    }

    let mut rounds = 0;
    loop {
        rounds += 1;
        let sol = lp::solve(&program)?;
        let mut f = EdgeVariables::zeros(n);
        for (&(a, b), &j) in &var {
            f.set(a, b, sol.primal[j]);
        }
        let violated: Vec<_> = check_odd_wheels(&f, 5)
            .into_iter()
            .filter_map(|v| match v {
                Violation::Wheel { hub, rim, .. } if rim.len() == 5 => Some((hub, rim)),
                _ => None,
            })
            .collect();
        if violated.is_empty() {
            return Ok(CcLpSolution {
                objective: sol.objective,
                f,
                rounds,
                rows: program.n_rows(),
            });
        }
        for (hub, rim) in violated {
            add(&mut program, &wheel_terms(hub, &rim), 2.0);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tightness {
    pub cg_lp: f64,
    pub cc_lp: f64,
    /// `cg_lp - cc_lp`; never below `-1e-6` when the packing relaxation is at
    /// least as tight.
    pub gap: f64,
}

/// Runs exact column generation and the correlation-clustering LP on the
/// same instance.
pub fn compare_tightness(instance: &Instance) -> Result<Tightness, SolverError> {
    let n = instance.n_observations();
    if n > CC_LP_MAX_OBSERVATIONS {
        return Err(SolverError::SizeLimit { size: n, limit: CC_LP_MAX_OBSERVATIONS });
    }
    let config = CgConfig::new(DoiConfig::new(DoiMode::None), PricingConfig::exact());
    let cg_lp = run_cg(instance, &config)?.lp_objective;
    let cc_lp = solve_cc_lp(instance)?.objective;
    Ok(Tightness { cg_lp, cc_lp, gap: cg_lp - cc_lp })
}
