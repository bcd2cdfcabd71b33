use crate::instance::{Column, Instance, ObsId};

use super::ColumnPool;

/// Removal bound of every member of `column`, aligned with its members:
/// `eps + max(0, -sum_{d1 in g} theta_{d d1} * (1 + [theta_{d d1} < 0]))`.
///
/// Any nonempty subset `S` of the members then satisfies
/// `sum_{d in S} xi_d >= eps + cost(g \ S) - cost(g)`.
pub fn compute_xi_dg(instance: &Instance, column: &Column, epsilon: f64) -> Vec<f64> {
    let members = column.members();
    members
        .iter()
        .map(|&d| {
            let mut acc = 0.0;
            for &o in members {
                if o == d {
                    continue;
                }
                let t = instance
                    .theta(d, o)
                    .expect("pooled columns only hold compatible pairs");
                acc += if t < 0.0 { 2.0 * t } else { t };
            }
            epsilon + (-acc).max(0.0)
        })
        .collect()
}

/// Per-observation bound of the varying formulation: the largest removal
/// bound over pooled columns, or `eps` for observations in no column.
pub fn compute_varying_xi(n_observations: usize, pool: &ColumnPool, epsilon: f64) -> Vec<f64> {
    let mut out = vec![epsilon; n_observations];
    for col in pool.columns() {
        for (d, xi) in col.xi_by_member() {
            let slot: &mut f64 = &mut out[d as ObsId];
            if xi > *slot {
                *slot = xi;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testing::golden_instance;

    const EPS: f64 = 1e-6;

    #[test]
    fn golden_bounds() {
        let inst = golden_instance();
        let g1 = Column::new(&inst, &[0, 1, 2]).unwrap();
        let g2 = Column::new(&inst, &[2, 3, 4]).unwrap();
        let x1 = compute_xi_dg(&inst, &g1, EPS);
        let x2 = compute_xi_dg(&inst, &g2, EPS);
        assert_eq!(x1[2], 400.0 + EPS);
        assert_eq!(x2[0], 4.0 + EPS);
        assert_eq!(x2[1], 202.0 + EPS);
    }

    #[test]
    fn singleton_bound_is_epsilon() {
        let inst = golden_instance();
        let g = Column::new(&inst, &[3]).unwrap();
        assert_eq!(compute_xi_dg(&inst, &g, EPS), vec![EPS]);
    }

    #[test]
    fn positive_costs_clamp_at_zero() {
        let inst = Instance::from_pairs(2, [(0, 1, 3.0)]).unwrap();
        let g = Column::new(&inst, &[0, 1]).unwrap();
        assert_eq!(compute_xi_dg(&inst, &g, EPS), vec![EPS, EPS]);
    }

    #[test]
    fn varying_over_pools() {
        let inst = golden_instance();
        let mut pool = ColumnPool::new(EPS);
        assert!(compute_varying_xi(5, &pool, EPS).iter().all(|&x| x == EPS));
        pool.add_columns(&inst, [vec![2, 3, 4]]).unwrap();
        assert_eq!(compute_varying_xi(5, &pool, EPS)[2], 4.0 + EPS);
        pool.add_columns(&inst, [vec![0, 1, 2]]).unwrap();
        let xi = compute_varying_xi(5, &pool, EPS);
        assert_eq!(xi[2], 400.0 + EPS);
        assert_eq!(xi[0], 400.0 + EPS);
    }
}
