//! Planted-partition instances for tests and benchmarks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::SolverError;
use crate::instance::Instance;

/// Clusters at most this far apart (in cluster index) may share noise pairs.
pub const BLOCKING_RADIUS: usize = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Synthetic {
    pub instance: Instance,
    /// Planted cluster of every observation.
    pub truth: Vec<usize>,
}

/// `n` observations dealt at random into `clusters` groups of near-equal
/// size. Pairs inside a group cost `U(-1, -0.2)`. A `noise` fraction of the
/// pairs between groups within the blocking radius cost `U(-0.2, 0.5)`. All
/// other pairs are blocked.
pub fn generate_synthetic(n: usize, clusters: usize, noise: f64, seed: u64) -> Result<Synthetic, SolverError> {
    if clusters == 0 || clusters > n.max(1) {
        return Err(SolverError::Config(format!("cannot plant {clusters} clusters in {n} observations")));
    }
    if !(0.0..=1.0).contains(&noise) {
        return Err(SolverError::Config(format!("noise {noise} outside [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut truth = vec![0; n];
    for (pos, &d) in order.iter().enumerate() {
        truth[d] = pos % clusters;
    }
    let mut instance = Instance::new(n);
    for a in 0..n {
        for b in a + 1..n {
            let (ca, cb) = (truth[a], truth[b]);
            let theta = if ca == cb {
                rng.gen_range(-1.0..-0.2)
            } else if ca.abs_diff(cb) <= BLOCKING_RADIUS && noise > 0.0 && rng.gen_bool(noise) {
                rng.gen_range(-0.2..0.5)
            } else {
                continue;
            };
            instance.insert_pair(a, b, theta).expect("each pair is visited once");
        }
    }
    Ok(Synthetic { instance, truth })
}
