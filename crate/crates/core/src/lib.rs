//! Entity resolution as minimum-weight set packing.
//!
//! Observations are packed into hypotheses (clusters) by column generation
//! over the set-packing LP relaxation. The restricted master problem can be
//! stabilized with varying or flexible dual-optimal inequalities, pricing
//! runs over non-dominated neighborhoods, and the terminal pool is turned
//! into a clustering by a small binary program followed by overlap repair.

pub mod ccrelax;
pub mod cli;
pub mod colgen;
pub mod error;
pub mod instance;
pub mod io;
pub mod lp;
pub mod master;
pub mod metrics;
pub mod pricing;
pub mod synth;

#[doc(hidden)]
pub mod testing;

pub use colgen::{integerize, repair_overlaps, run_cg, CgConfig, CgResult, Clustering};
pub use error::{InstanceError, LpError, MetricsError, SolverError};
pub use instance::{hypothesis_cost, Column, Instance, ObsId};
pub use master::{DoiConfig, DoiMode};
pub use pricing::{PricingConfig, PricingStrategy};
