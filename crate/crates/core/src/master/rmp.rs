use std::collections::HashMap;

use serde::Serialize;

use crate::error::LpError;
use crate::instance::ObsId;
use crate::lp::{self, LinearProgram};

use super::{ColumnPool, DoiConfig, DoiMode, ThresholdLadder};

/// Identifies a row of the master LP: one per observation, or one per
/// observation and kept rung in flexible mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct RowKey {
    pub obs: ObsId,
    pub rung: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct XiVar {
    pub key: RowKey,
    pub var: usize,
    pub cost: f64,
}

/// Maps LP variables and rows back to columns and observations. Variable
/// `j < n_columns` is the weight of pool column `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct RmpLayout {
    pub mode: DoiMode,
    pub n_columns: usize,
    pub xi_vars: Vec<XiVar>,
    pub rows: Vec<RowKey>,
}

/// A basic variable named independently of its LP index, so that a basis
/// survives rebuilding the program.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisKey {
    Column(usize),
    Xi(RowKey),
    Slack(RowKey),
}

impl RmpLayout {
    fn n_variables(&self) -> usize {
        self.n_columns + self.xi_vars.len()
    }

    pub fn basis_keys(&self, basis: &[usize]) -> Vec<BasisKey> {
        let n = self.n_variables();
        basis
            .iter()
            .map(|&j| {
                if j < self.n_columns {
                    BasisKey::Column(j)
                } else if j < n {
                    BasisKey::Xi(self.xi_vars[j - self.n_columns].key)
                } else {
                    BasisKey::Slack(self.rows[j - n])
                }
            })
            .collect()
    }

    /// LP indices of the keys present in this layout.
    pub fn basis_indices(&self, keys: &[BasisKey]) -> Vec<usize> {
        let n = self.n_variables();
        let xi: HashMap<RowKey, usize> = self.xi_vars.iter().map(|v| (v.key, v.var)).collect();
        let rows: HashMap<RowKey, usize> = self.rows.iter().enumerate().map(|(i, &k)| (k, i)).collect();
        keys.iter()
            .filter_map(|key| match key {
                BasisKey::Column(j) => (*j < self.n_columns).then_some(*j),
                BasisKey::Xi(k) => xi.get(k).copied(),
                BasisKey::Slack(k) => rows.get(k).map(|i| n + i),
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct XiValue {
    pub key: RowKey,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualSolution {
    /// Aggregate dual per observation; in flexible mode the sum over that
    /// observation's rungs.
    pub lambda: Vec<f64>,
    /// Flexible mode only: `(d, rung, value)` for every threshold row.
    pub per_threshold: Vec<(ObsId, usize, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RmpSolution {
    pub objective: f64,
    pub gamma: Vec<f64>,
    pub xi: Vec<XiValue>,
    pub duals: DualSolution,
    pub pivots: usize,
}

/// Builds the master LP for `pool` under `config`.
///
/// `varying_xi` is read in varying mode and `ladders` in flexible mode
/// (rebuilt from the pool when not supplied).
pub fn build_rmp(
    n_observations: usize,
    pool: &ColumnPool,
    config: &DoiConfig,
    varying_xi: &[f64],
    ladders: Option<&[ThresholdLadder]>,
) -> (LinearProgram, RmpLayout) {
    let mut lp = LinearProgram::new();
    for col in pool.columns() {
        lp.add_variable(col.cost(), 0.0, f64::INFINITY);
    }
    let mut layout = RmpLayout {
        mode: config.mode,
        n_columns: pool.len(),
        xi_vars: Vec::new(),
        rows: Vec::new(),
    };
    match config.mode {
        DoiMode::None | DoiMode::Varying => {
            let mut entries: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n_observations];
            for (j, col) in pool.columns().iter().enumerate() {
                for &d in col.members() {
                    entries[d].push((j, 1.0));
                }
            }
            for (d, mut row) in entries.into_iter().enumerate() {
                let key = RowKey { obs: d, rung: None };
                if config.mode == DoiMode::Varying {
                    let var = lp.add_variable(varying_xi[d], 0.0, f64::INFINITY);
                    layout.xi_vars.push(XiVar { key, var, cost: varying_xi[d] });
                    row.push((var, -1.0));
                }
                lp.add_row(row, 1.0);
                layout.rows.push(key);
            }
        }
        DoiMode::Flexible => {
            let owned;
            let ladders = match ladders {
                Some(l) => l,
                None => {
                    owned = super::build_ladders(n_observations, pool, config.k);
                    &owned[..]
                }
            };
            let mut row_base = vec![0usize; n_observations];
            let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
            for (d, ladder) in ladders.iter().enumerate() {
                row_base[d] = rows.len();
                for (r, inc) in ladder.selected_increments().into_iter().enumerate() {
                    let key = RowKey { obs: d, rung: Some(r) };
                    let var = lp.add_variable(inc, 0.0, f64::INFINITY);
                    layout.xi_vars.push(XiVar { key, var, cost: inc });
                    layout.rows.push(key);
                    rows.push(vec![(var, -1.0)]);
                }
            }
            for (j, col) in pool.columns().iter().enumerate() {
                for (d, xi) in col.xi_by_member() {
                    let top = ladders[d]
                        .rung_for(xi)
                        .expect("every pooled bound appears on its ladder");
                    for r in 0..=top {
                        rows[row_base[d] + r].push((j, 1.0));
                    }
                }
            }
            for row in rows {
                lp.add_row(row, 1.0);
            }
        }
    }
    (lp, layout)
}

/// Solves the master LP over `pool` and maps the solution back.
pub fn solve_rmp(
    n_observations: usize,
    pool: &ColumnPool,
    config: &DoiConfig,
) -> Result<RmpSolution, LpError> {
    let varying = super::compute_varying_xi(n_observations, pool, config.epsilon);
    let (lp, layout) = build_rmp(n_observations, pool, config, &varying, None);
    solve_built(n_observations, &lp, &layout)
}

pub(crate) fn solve_built(
    n_observations: usize,
    lp: &LinearProgram,
    layout: &RmpLayout,
) -> Result<RmpSolution, LpError> {
    let sol = lp::solve(lp)?;
    Ok(translate(n_observations, layout, &sol))
}

pub(crate) fn translate(n_observations: usize, layout: &RmpLayout, sol: &lp::LpSolution) -> RmpSolution {
    let gamma = sol.primal[..layout.n_columns].to_vec();
    let xi = layout
        .xi_vars
        .iter()
        .map(|v| XiValue { key: v.key, value: sol.primal[v.var] })
        .collect();
    let mut lambda = vec![0.0; n_observations];
    let mut per_threshold = Vec::new();
    for (key, &y) in layout.rows.iter().zip(&sol.dual) {
        // Duals of <= rows are non-positive; clear rounding noise.
        let y = y.min(0.0);
        lambda[key.obs] += y;
        if let Some(r) = key.rung {
            per_threshold.push((key.obs, r, y));
        }
    }
    RmpSolution {
        objective: sol.objective,
        gamma,
        xi,
        duals: DualSolution { lambda, per_threshold },
        pivots: sol.pivots,
    }
}
