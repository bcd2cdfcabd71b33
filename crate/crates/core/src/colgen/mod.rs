//! Column generation driver and terminal integerization.

mod integer;

pub use integer::{integerize, repair_overlaps, Clustering, Integerization, BNB_NODE_LIMIT};

use std::time::Instant;

use serde::Serialize;

use crate::error::SolverError;
use crate::instance::{nondominated_neighborhoods, rank, Instance};
use crate::master::{ColumnPool, DoiConfig, MasterProblem, RmpSolution};
use crate::pricing::{price_pass, PricingConfig, PricingStrategy};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CgConfig {
    pub doi: DoiConfig,
    pub pricing: PricingConfig,
    pub reduced_cost_tol: f64,
    pub max_iterations: usize,
    /// Run an exact pass before declaring convergence under heuristic
    /// pricing. Hybrid pricing always does.
    pub verify_exact: bool,
    /// Warm start every master solve from the previous basis.
    pub warm_start: bool,
}

impl Default for CgConfig {
    fn default() -> Self {
        CgConfig {
            doi: DoiConfig::default(),
            pricing: PricingConfig::default(),
            reduced_cost_tol: 1e-9,
            max_iterations: 10_000,
            verify_exact: true,
            warm_start: false,
        }
    }
}

impl CgConfig {
    pub fn new(doi: DoiConfig, pricing: PricingConfig) -> Self {
        CgConfig { doi, pricing, ..Default::default() }
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        self.doi.validate()?;
        self.pricing.validate()?;
        if self.reduced_cost_tol.is_nan() || self.reduced_cost_tol <= 0.0 {
            return Err(SolverError::Config("reduced-cost tolerance must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationStats {
    pub iteration: usize,
    pub objective: f64,
    pub pool_size: usize,
    pub new_columns: usize,
    pub min_reduced_cost: Option<f64>,
    pub lp_pivots: usize,
    pub exact_pass: bool,
    #[serde(skip)]
    pub pricing_seconds: f64,
}

#[derive(Debug, Clone)]
pub struct CgResult {
    pub lp_objective: f64,
    pub pool: ColumnPool,
    /// Master solution at termination.
    pub rmp: RmpSolution,
    pub iterations: usize,
    pub columns_generated: usize,
    pub stats: Vec<IterationStats>,
    /// Terminal pricing proved that no column has negative reduced cost.
    pub exact: bool,
    /// Neighborhoods that the terminal pass could only search heuristically.
    pub unverified: usize,
}

/// Alternates master solves and pricing until no improving column is found.
pub fn run_cg(instance: &Instance, config: &CgConfig) -> Result<CgResult, SolverError> {
    config.validate()?;
    let n = instance.n_observations();
    let hoods = nondominated_neighborhoods(instance, &rank(instance));
    let mut master = MasterProblem::new(n, config.doi);
    master.set_warm_start(config.warm_start);
    let mut stats = Vec::new();

    for iteration in 0..config.max_iterations {
        let rmp = master.solve()?;
        let lambda = &rmp.duals.lambda;
        let started = Instant::now();
        let strategy = config.pricing.strategy;
        let mut exact_pass = strategy == PricingStrategy::Exact;
        let mut report = price_pass(instance, &hoods, lambda, &config.pricing, iteration as u64, exact_pass);
        if report.columns.is_empty() && !exact_pass && (config.verify_exact || strategy == PricingStrategy::Hybrid) {
            exact_pass = true;
            report = price_pass(instance, &hoods, lambda, &config.pricing, iteration as u64, true);
        }
        let pricing_seconds = started.elapsed().as_secs_f64();

        let candidates: Vec<_> = report
            .columns
            .iter()
            .filter(|c| c.reduced_cost < -config.reduced_cost_tol)
            .map(|c| c.members.clone())
            .collect();
        let min_reduced_cost = report.columns.iter().map(|c| c.reduced_cost).reduce(f64::min);
        let added = master.add_columns(instance, candidates)?;
        stats.push(IterationStats {
            iteration,
            objective: rmp.objective,
            pool_size: master.pool().len(),
            new_columns: added,
            min_reduced_cost,
            lp_pivots: rmp.pivots,
            exact_pass,
            pricing_seconds,
        });
        if added == 0 {
            let columns_generated = master.pool().len();
            return Ok(CgResult {
                lp_objective: rmp.objective,
                pool: master.into_pool(),
                rmp,
                iterations: iteration + 1,
                columns_generated,
                stats,
                exact: exact_pass && report.unverified == 0,
                unverified: report.unverified,
            });
        }
    }
    Err(SolverError::MaxIterations(config.max_iterations))
}
