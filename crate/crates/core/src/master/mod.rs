//! Restricted master problem: the column pool, the removal bounds that drive
//! the dual-optimal inequalities, and the three LP formulations.

mod ladder;
mod pool;
mod rmp;
mod xi;

pub use ladder::{build_ladders, ThresholdLadder};
pub use pool::ColumnPool;
pub use rmp::{build_rmp, solve_rmp, BasisKey, DualSolution, RmpLayout, RmpSolution, RowKey, XiVar};
pub use xi::{compute_varying_xi, compute_xi_dg};

use serde::{Deserialize, Serialize};

use crate::error::{InstanceError, LpError, SolverError};
use crate::instance::{Instance, ObsId};
use crate::lp;

/// How the restricted master problem bounds its dual variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DoiMode {
    /// Plain set-packing rows, duals only bounded by zero above.
    None,
    /// One lower bound per observation, the largest removal bound in the pool.
    Varying,
    /// One lower bound per observation and threshold rung.
    Flexible,
}

impl std::str::FromStr for DoiMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(DoiMode::None),
            "varying" => Ok(DoiMode::Varying),
            "flexible" => Ok(DoiMode::Flexible),
            other => Err(format!("unknown DOI mode `{other}`")),
        }
    }
}

impl std::fmt::Display for DoiMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DoiMode::None => "none",
            DoiMode::Varying => "varying",
            DoiMode::Flexible => "flexible",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoiConfig {
    pub mode: DoiMode,
    /// Number of rungs kept besides the largest one (flexible mode).
    pub k: usize,
    pub epsilon: f64,
}

impl Default for DoiConfig {
    fn default() -> Self {
        DoiConfig {
            mode: DoiMode::Flexible,
            k: 5,
            epsilon: 1e-6,
        }
    }
}

impl DoiConfig {
    pub fn new(mode: DoiMode) -> Self {
        DoiConfig { mode, ..Default::default() }
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = k;
        self
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(SolverError::Config(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if self.mode == DoiMode::Flexible && self.k == 0 {
            return Err(SolverError::Config("flexible mode needs K >= 1".into()));
        }
        Ok(())
    }
}

/// Pool plus the cached bound structures for one DOI configuration.
#[derive(Debug, Clone)]
pub struct MasterProblem {
    n: usize,
    config: DoiConfig,
    pool: ColumnPool,
    varying_xi: Vec<f64>,
    ladders: Option<Vec<ThresholdLadder>>,
    warm_start: bool,
    /// Optimal basis of the previous solve, used to warm start the next.
    warm: Vec<BasisKey>,
}

impl MasterProblem {
    pub fn new(n_observations: usize, config: DoiConfig) -> Self {
        MasterProblem {
            n: n_observations,
            config,
            pool: ColumnPool::new(config.epsilon),
            varying_xi: vec![config.epsilon; n_observations],
            ladders: None,
            warm_start: false,
            warm: Vec::new(),
        }
    }

    /// Start each solve from the previous optimal basis. Faster per solve,
    /// but the duals then stay close to the previous ones, which blunts the
    /// dual bounds and usually costs iterations.
    pub fn set_warm_start(&mut self, on: bool) {
        self.warm_start = on;
        self.warm.clear();
    }

    pub fn config(&self) -> &DoiConfig {
        &self.config
    }

    pub fn pool(&self) -> &ColumnPool {
        &self.pool
    }

    pub fn into_pool(self) -> ColumnPool {
        self.pool
    }

    /// Per-observation bounds of the varying formulation.
    pub fn varying_xi(&self) -> &[f64] {
        &self.varying_xi
    }

    /// Adds the new member sets to the pool and refreshes the bounds.
    /// Returns how many were not already pooled.
    pub fn add_columns<I>(&mut self, instance: &Instance, sets: I) -> Result<usize, InstanceError>
    where
        I: IntoIterator<Item = Vec<ObsId>>,
    {
        let before = self.pool.len();
        let added = self.pool.add_columns(instance, sets)?;
        for col in &self.pool.columns()[before..] {
            for (d, xi) in col.xi_by_member() {
                if xi > self.varying_xi[d] {
                    self.varying_xi[d] = xi;
                }
            }
        }
        if added > 0 {
            self.ladders = None;
        }
        Ok(added)
    }

    /// Threshold ladders for the current pool, rebuilt when stale.
    pub fn ladders(&mut self) -> &[ThresholdLadder] {
        if self.ladders.is_none() {
            self.ladders = Some(build_ladders(self.n, &self.pool, self.config.k));
        }
        self.ladders.as_deref().unwrap()
    }

    pub fn build(&mut self) -> (lp::LinearProgram, RmpLayout) {
        let n = self.n;
        let config = self.config;
        if config.mode == DoiMode::Flexible {
            self.ladders();
        }
        build_rmp(n, &self.pool, &config, &self.varying_xi, self.ladders.as_deref())
    }

    pub fn solve(&mut self) -> Result<RmpSolution, LpError> {
        let (lp, layout) = self.build();
        let hint = layout.basis_indices(&self.warm);
        let sol = if hint.is_empty() {
            lp::solve(&lp)?
        } else {
            lp::solve_warm(&lp, &hint)?
        };
        if self.warm_start {
            self.warm = layout.basis_keys(&sol.basis);
        }
        Ok(rmp::translate(self.n, &layout, &sol))
    }
}
