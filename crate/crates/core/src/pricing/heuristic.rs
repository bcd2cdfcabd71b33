//! Single-flip descent ("improve" style) for the pricing subproblem.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{PricedColumn, Subproblem, REDUCED_COST_TOL};

const IMPROVE_TOL: f64 = 1e-12;

/// Best local minimum over one greedy start and `restarts` single-node
/// starts. Returns `None` unless the best objective is below
/// `-REDUCED_COST_TOL`.
pub fn price_heuristic(sub: &Subproblem, restarts: usize, seed: u64) -> Option<PricedColumn> {
    let k = sub.len();
    if k == 0 {
        return None;
    }
    let mut starts: Vec<Vec<usize>> = Vec::new();
    if let Some(pair) = best_pair(sub) {
        starts.push(pair.to_vec());
    }

    // Single-node starts: nodes with a negative dual first, then the rest,
    // each group shuffled.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut covered: Vec<usize> = (0..k).filter(|&i| sub.lambda(i) < 0.0).collect();
    let mut free: Vec<usize> = (0..k).filter(|&i| sub.lambda(i) >= 0.0).collect();
    covered.shuffle(&mut rng);
    free.shuffle(&mut rng);
    starts.extend(covered.into_iter().chain(free).take(restarts).map(|i| vec![i]));

    let mut best: Option<(f64, Vec<usize>)> = None;
    for start in starts {
        let (value, set) = descend(sub, &start);
        if best.as_ref().is_none_or(|(b, _)| value < *b) {
            best = Some((value, set));
        }
    }
    let (_, set) = best?;
    let reduced_cost = sub.objective(&set)?;
    (reduced_cost < -REDUCED_COST_TOL).then(|| PricedColumn {
        members: sub.to_global(&set),
        reduced_cost,
    })
}

/// Steepest single-flip descent from `start` (which must be feasible).
/// Every move keeps the set free of blocked pairs.
pub fn descend(sub: &Subproblem, start: &[usize]) -> (f64, Vec<usize>) {
    let k = sub.len();
    let mut inside = vec![false; k];
    // Sum of pair terms between each node and the current members.
    let mut link = vec![0.0; k];
    let mut blocked = vec![0usize; k];

    let add = |u: usize, inside: &mut [bool], link: &mut [f64], blocked: &mut [usize], sign: f64| {
        inside[u] = sign > 0.0;
        for v in 0..k {
            if v == u {
                continue;
            }
            match sub.weight(u, v) {
                Some(w) => link[v] += sign * w,
                None => {
                    if sign > 0.0 {
                        blocked[v] += 1
                    } else {
                        blocked[v] -= 1
                    }
                }
            }
        }
    };
    for &u in start {
        add(u, &mut inside, &mut link, &mut blocked, 1.0);
    }

    loop {
        let mut best_delta = -IMPROVE_TOL;
        let mut best_node = None;
        for u in 0..k {
            let delta = if inside[u] {
                sub.lambda(u) - link[u]
            } else if blocked[u] == 0 {
                -sub.lambda(u) + link[u]
            } else {
                continue;
            };
            if delta < best_delta {
                best_delta = delta;
                best_node = Some(u);
            }
        }
        let Some(u) = best_node else { break };
        let sign = if inside[u] { -1.0 } else { 1.0 };
        add(u, &mut inside, &mut link, &mut blocked, sign);
    }

    let set: Vec<usize> = (0..k).filter(|&u| inside[u]).collect();
    let value = sub.objective(&set).unwrap_or(f64::INFINITY);
    (value, set)
}

/// Compatible pair with the lowest objective, if any is negative.
fn best_pair(sub: &Subproblem) -> Option<[usize; 2]> {
    let mut best = (-IMPROVE_TOL, None);
    for (i, j) in sub.internal_pairs() {
        let v = -sub.lambda(i) - sub.lambda(j) + sub.weight(i, j).unwrap_or(0.0);
        if v < best.0 {
            best = (v, Some([i, j]));
        }
    }
    best.1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Instance;
    use crate::testing::golden_instance;

    #[test]
    fn golden_from_d1() {
        let inst = golden_instance();
        let sub = Subproblem::new(&inst, &[0, 1, 2, 3, 4], &[0.0; 5]);
        let (value, set) = descend(&sub, &[0]);
        assert_eq!(set, vec![0, 1, 2]);
        assert_eq!(value, -600.0);
        let best = price_heuristic(&sub, 3, 7).unwrap();
        assert_eq!(best.members, vec![0, 1, 2]);
    }

    #[test]
    fn nonnegative_costs_give_nothing() {
        let inst = Instance::from_pairs(3, [(0, 1, 0.2), (0, 2, 0.4)]).unwrap();
        let sub = Subproblem::new(&inst, &[0, 1, 2], &[0.0; 3]);
        assert_eq!(price_heuristic(&sub, 3, 1), None);
    }

    #[test]
    fn removal_moves_are_taken() {
        // Starting from {0,1,2} with d2 priced out, the descent drops it.
        let inst = golden_instance();
        let lambda = [0.0, 0.0, -1000.0, 0.0, 0.0];
        let sub = Subproblem::new(&inst, &[0, 1, 2], &lambda);
        let (value, set) = descend(&sub, &[0, 1, 2]);
        assert_eq!(set, vec![0, 1]);
        assert_eq!(value, -200.0);
    }
}
