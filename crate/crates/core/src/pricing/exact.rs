//! Depth-first branch-and-bound over node inclusion decisions.
//!
//! Pair products never appear as variables: once a node is included its
//! pair terms are folded into the unary cost of the remaining candidates.

use super::{PricedColumn, Subproblem, REDUCED_COST_TOL};
use crate::error::SolverError;

/// Hard cap imposed by the bitmask representation.
pub const MAX_EXACT_NODES: usize = 64;

/// Global minimizer of the subproblem objective, or `None` when the minimum
/// is not below `-REDUCED_COST_TOL`.
pub fn price_exact(sub: &Subproblem, limit: usize) -> Result<Option<PricedColumn>, SolverError> {
    let limit = limit.min(MAX_EXACT_NODES);
    let k = sub.len();
    if k > limit {
        return Err(SolverError::SizeLimit { size: k, limit });
    }
    let mut conflict = vec![0u64; k];
    let mut neg = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..k {
            if i == j {
                continue;
            }
            match sub.weight(i, j) {
                Some(w) => neg[i * k + j] = w.min(0.0),
                None => conflict[i] |= 1 << j,
            }
        }
    }
    let unary: Vec<f64> = (0..k).map(|i| -sub.lambda(i)).collect();
    let mut search = Search {
        sub,
        k,
        conflict,
        neg,
        best_value: -REDUCED_COST_TOL,
        best: Vec::new(),
        current: Vec::new(),
    };
    let all = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
    search.dfs(all, 0.0, &unary);
    if search.best.is_empty() {
        return Ok(None);
    }
    let reduced_cost = sub
        .objective(&search.best)
        .expect("search only includes compatible nodes");
    Ok(Some(PricedColumn {
        members: sub.to_global(&search.best),
        reduced_cost,
    }))
}

struct Search<'a> {
    sub: &'a Subproblem,
    k: usize,
    conflict: Vec<u64>,
    /// `min(0, w_ij)` row-major.
    neg: Vec<f64>,
    best_value: f64,
    best: Vec<usize>,
    current: Vec<usize>,
}

impl Search<'_> {
    /// `free`: undecided nodes compatible with everything included so far.
    /// `unary[u]`: cost of adding `u` given the included nodes.
    fn dfs(&mut self, free: u64, value: f64, unary: &[f64]) {
        if free == 0 {
            return;
        }
        let mut bound = value;
        let mut pick = usize::MAX;
        let mut pick_cost = f64::INFINITY;
        let mut rest = free;
        while rest != 0 {
            let u = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            bound += unary[u].min(0.0);
            let mut others = rest;
            while others != 0 {
                let v = others.trailing_zeros() as usize;
                others &= others - 1;
                bound += self.neg[u * self.k + v];
            }
            if unary[u] < pick_cost {
                pick_cost = unary[u];
                pick = u;
            }
        }
        if bound >= self.best_value {
            return;
        }

        // Include `pick`.
        let included_value = value + unary[pick];
        self.current.push(pick);
        if included_value < self.best_value {
            self.best_value = included_value;
            self.best = self.current.clone();
        }
        let next_free = free & !(1u64 << pick) & !self.conflict[pick];
        let mut next_unary = unary.to_vec();
        let mut rest = next_free;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            next_unary[v] += self.sub.weight(pick, v).expect("free nodes are compatible");
        }
        self.dfs(next_free, included_value, &next_unary);
        self.current.pop();

        // Exclude `pick`.
        self.dfs(free & !(1u64 << pick), value, unary);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Instance;
    use crate::testing::golden_instance;

    #[test]
    fn golden_whole_instance() {
        let inst = golden_instance();
        let sub = Subproblem::new(&inst, &[0, 1, 2, 3, 4], &[0.0; 5]);
        let best = price_exact(&sub, 24).unwrap().unwrap();
        assert_eq!(best.members, vec![0, 1, 2]);
        assert_eq!(best.reduced_cost, -600.0);
    }

    #[test]
    fn nonnegative_costs_give_nothing() {
        let inst = Instance::from_pairs(3, [(0, 1, 0.5), (1, 2, 0.0)]).unwrap();
        let sub = Subproblem::new(&inst, &[0, 1, 2], &[0.0; 3]);
        assert_eq!(price_exact(&sub, 24).unwrap(), None);
    }

    #[test]
    fn single_node_with_negative_dual() {
        let inst = Instance::new(1);
        let sub = Subproblem::new(&inst, &[0], &[-3.0]);
        assert_eq!(price_exact(&sub, 24).unwrap(), None);
    }

    #[test]
    fn duals_shift_the_optimum() {
        let inst = golden_instance();
        // Pricing d3 and d1 out leaves {3,4} as the best column.
        let lambda = [-150.0, 0.0, -600.0, 0.0, 0.0];
        let sub = Subproblem::new(&inst, &[0, 1, 2, 3, 4], &lambda);
        let best = price_exact(&sub, 24).unwrap().unwrap();
        assert_eq!(best.members, vec![3, 4]);
        assert_eq!(best.reduced_cost, -200.0);
    }

    #[test]
    fn size_limit() {
        let inst = Instance::new(30);
        let nodes: Vec<_> = (0..30).collect();
        let sub = Subproblem::new(&inst, &nodes, &[0.0; 30]);
        assert_eq!(
            price_exact(&sub, 24),
            Err(SolverError::SizeLimit { size: 30, limit: 24 })
        );
    }
}
