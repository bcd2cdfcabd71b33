//! Pricing: search non-dominated neighborhoods for columns of negative
//! reduced cost.

mod exact;
mod heuristic;
mod subproblem;

pub use exact::{price_exact, MAX_EXACT_NODES};
pub use heuristic::{descend, price_heuristic};
pub use subproblem::Subproblem;

use std::collections::HashSet;
use std::sync::atomic::{AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::SolverError;
use crate::instance::{hypothesis_cost, Column, Instance, ObsId};

/// Columns priced at or above this are not reported.
pub const REDUCED_COST_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PricingStrategy {
    Exact,
    Heuristic,
    /// Heuristic first; exact only when the heuristic finds nothing.
    Hybrid,
}

impl std::str::FromStr for PricingStrategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(PricingStrategy::Exact),
            "heuristic" => Ok(PricingStrategy::Heuristic),
            "hybrid" => Ok(PricingStrategy::Hybrid),
            other => Err(format!("unknown pricing strategy `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PricingConfig {
    pub strategy: PricingStrategy,
    /// Stop a pricing round after this many distinct columns (partial pricing).
    pub max_new_columns: usize,
    /// Single-node starts per subproblem for the heuristic.
    pub restarts: usize,
    pub seed: u64,
    /// Neighborhoods larger than this are never solved exactly.
    pub exact_limit: usize,
    pub threads: usize,
}

impl Default for PricingConfig {
    fn default() -> Self {
        PricingConfig {
            strategy: PricingStrategy::Hybrid,
            max_new_columns: 50,
            restarts: 3,
            seed: 0,
            exact_limit: 24,
            threads: 1,
        }
    }
}

impl PricingConfig {
    pub fn exact() -> Self {
        PricingConfig { strategy: PricingStrategy::Exact, ..Default::default() }
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        if self.max_new_columns == 0 {
            return Err(SolverError::Config("max_new_columns must be at least 1".into()));
        }
        if self.threads == 0 {
            return Err(SolverError::Config("threads must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PricedColumn {
    pub members: Vec<ObsId>,
    pub reduced_cost: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct PricingReport {
    pub columns: Vec<PricedColumn>,
    /// Every visited neighborhood was solved exactly.
    pub exact: bool,
    /// Neighborhoods that had to fall back to the heuristic in an exact pass.
    pub unverified: usize,
    pub subproblems: usize,
}

/// `cost(g) - sum_{d in g} lambda_d`.
pub fn reduced_cost(column: &Column, lambda: &[f64]) -> f64 {
    column.cost() - column.members().iter().map(|&d| lambda[d]).sum::<f64>()
}

/// One pricing round under `config.strategy`.
pub fn price_all(
    instance: &Instance,
    neighborhoods: &[Vec<ObsId>],
    lambda: &[f64],
    config: &PricingConfig,
    round: u64,
) -> PricingReport {
    match config.strategy {
        PricingStrategy::Exact => price_pass(instance, neighborhoods, lambda, config, round, true),
        PricingStrategy::Heuristic => price_pass(instance, neighborhoods, lambda, config, round, false),
        PricingStrategy::Hybrid => {
            let first = price_pass(instance, neighborhoods, lambda, config, round, false);
            if !first.columns.is_empty() {
                return first;
            }
            let mut second = price_pass(instance, neighborhoods, lambda, config, round, true);
            second.subproblems += first.subproblems;
            second
        }
    }
}

/// Visits `neighborhoods` in order until `max_new_columns` distinct columns
/// are found. With `exact`, neighborhoods within the size limit are solved
/// by branch-and-bound and larger ones by the heuristic.
pub fn price_pass(
    instance: &Instance,
    neighborhoods: &[Vec<ObsId>],
    lambda: &[f64],
    config: &PricingConfig,
    round: u64,
    exact: bool,
) -> PricingReport {
    let cap = config.max_new_columns.max(1);
    // Only columns clearing the tolerance (with their reduced cost recomputed
    // from the instance) count towards the cap.
    let solve_one = |idx: usize| -> (Option<PricedColumn>, bool) {
        let nodes = &neighborhoods[idx];
        let sub = Subproblem::new(instance, nodes, lambda);
        let (found, was_exact) = if exact && nodes.len() <= config.exact_limit.min(MAX_EXACT_NODES) {
            (price_exact(&sub, config.exact_limit).expect("size checked above"), true)
        } else {
            let seed = subproblem_seed(config.seed, round, idx);
            (price_heuristic(&sub, config.restarts, seed), false)
        };
        let found = found.and_then(|mut col| {
            let cost = hypothesis_cost(instance, &col.members).expect("priced columns are feasible");
            col.reduced_cost = cost - col.members.iter().map(|&d| lambda[d]).sum::<f64>();
            (col.reduced_cost < -REDUCED_COST_TOL).then_some(col)
        });
        (found, was_exact)
    };

    let mut results: Vec<(usize, Option<PricedColumn>, bool)> = Vec::new();
    if config.threads <= 1 {
        let mut seen = HashSet::new();
        for idx in 0..neighborhoods.len() {
            let (found, was_exact) = solve_one(idx);
            if let Some(c) = &found {
                seen.insert(c.members.clone());
            }
            results.push((idx, found, was_exact));
            if seen.len() >= cap {
                break;
            }
        }
    } else {
        let next = AtomicUsize::new(0);
        let found_count = AtomicUsize::new(0);
        let chunks: Vec<Vec<(usize, Option<PricedColumn>, bool)>> = std::thread::scope(|scope| {
            let handles: Vec<_> = (0..config.threads)
                .map(|_| {
                    scope.spawn(|| {
                        let mut local = Vec::new();
                        loop {
                            if found_count.load(Ordering::Relaxed) >= cap {
                                break;
                            }
                            let idx = next.fetch_add(1, Ordering::Relaxed);
                            if idx >= neighborhoods.len() {
                                break;
                            }
                            let (found, was_exact) = solve_one(idx);
                            if found.is_some() {
                                found_count.fetch_add(1, Ordering::Relaxed);
                            }
                            local.push((idx, found, was_exact));
                        }
                        local
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("pricing worker panicked")).collect()
        });
        results = chunks.into_iter().flatten().collect();
        results.sort_by_key(|r| r.0);
    }

    let mut report = PricingReport {
        exact,
        ..Default::default()
    };
    let mut seen = HashSet::new();
    for (_, found, was_exact) in results {
        report.subproblems += 1;
        if exact && !was_exact {
            report.unverified += 1;
            report.exact = false;
        }
        if let Some(col) = found {
            if report.columns.len() < cap && seen.insert(col.members.clone()) {
                report.columns.push(col);
            }
        }
    }
    report
}

fn subproblem_seed(seed: u64, round: u64, idx: usize) -> u64 {
    // splitmix64 over the three inputs.
    let mut z = seed
        .wrapping_add(round.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add((idx as u64).wrapping_mul(0xBF58_476D_1CE4_E5B9));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
