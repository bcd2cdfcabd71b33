use serde::Serialize;

use crate::error::{InstanceError, LpError, SolverError};
use crate::instance::{hypothesis_cost, Instance, ObsId};
use crate::lp::{self, LinearProgram};
use crate::master::{build_rmp, compute_varying_xi, ColumnPool, DoiConfig, DoiMode};

const INTEGRALITY_TOL: f64 = 1e-7;

/// Branch-and-bound gives up (keeping its incumbent) after this many nodes.
pub const BNB_NODE_LIMIT: usize = 100_000;

/// A partition of all observations. Clusters are sorted internally and by
/// their smallest member.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Clustering {
    pub clusters: Vec<Vec<ObsId>>,
    pub total_cost: f64,
}

impl Clustering {
    /// Completes a packing with singletons. Fails if two sets overlap or a set
    /// holds a blocked pair.
    pub fn from_packing(instance: &Instance, packing: &[Vec<ObsId>]) -> Result<Self, InstanceError> {
        let n = instance.n_observations();
        let mut seen = vec![false; n];
        let mut clusters = Vec::new();
        let mut total_cost = 0.0;
        for set in packing {
            let mut set = set.clone();
            set.sort_unstable();
            set.dedup();
            if set.is_empty() {
                continue;
            }
            for &d in &set {
                if d >= n {
                    return Err(InstanceError::UnknownObservation(d));
                }
                if std::mem::replace(&mut seen[d], true) {
                    return Err(InstanceError::Overlap(d));
                }
            }
            total_cost += hypothesis_cost(instance, &set)?;
            clusters.push(set);
        }
        clusters.extend((0..n).filter(|&d| !seen[d]).map(|d| vec![d]));
        clusters.sort_unstable_by_key(|c| c[0]);
        Ok(Clustering { clusters, total_cost })
    }

    pub fn singletons(n: usize) -> Self {
        Clustering {
            clusters: (0..n).map(|d| vec![d]).collect(),
            total_cost: 0.0,
        }
    }

    /// Cluster index of every observation.
    pub fn labels(&self) -> Vec<usize> {
        let n = self.clusters.iter().map(|c| c.len()).sum();
        let mut labels = vec![0; n];
        for (k, c) in self.clusters.iter().enumerate() {
            for &d in c {
                labels[d] = k;
            }
        }
        labels
    }

    pub fn n_clusters(&self) -> usize {
        self.clusters.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Integerization {
    pub clustering: Clustering,
    /// Objective of the root relaxation.
    pub lp_objective: f64,
    pub lp_integral: bool,
    pub bnb_nodes: usize,
    /// False only when the node limit cut the search short.
    pub proven_optimal: bool,
    /// Pool indices picked by the binary program, before repair.
    pub selected: Vec<usize>,
    /// Memberships dropped by overlap repair.
    pub repairs: usize,
}

/// Picks a binary selection of pool columns and turns it into a clustering.
///
/// The binary program uses the flexible formulation when `doi.mode` is
/// flexible and plain set packing otherwise.
pub fn integerize(instance: &Instance, pool: &ColumnPool, doi: &DoiConfig) -> Result<Integerization, SolverError> {
    let n = instance.n_observations();
    let mode = if doi.mode == DoiMode::Flexible { DoiMode::Flexible } else { DoiMode::None };
    let config = DoiConfig { mode, ..*doi };
    let varying = compute_varying_xi(n, pool, config.epsilon);
    let (mut program, layout) = build_rmp(n, pool, &config, &varying, None);
    let m = layout.n_columns;
    for j in 0..m {
        program.set_bounds(j, 0.0, 1.0);
    }

    let root = lp::solve(&program)?;
    let lp_objective = root.objective;
    let lp_integral = root.primal[..m].iter().all(|&g| is_integral(g));

    let (selected, bnb_nodes, proven_optimal) = if lp_integral {
        let sel = (0..m).filter(|&j| root.primal[j] > 0.5).collect();
        (sel, 0, true)
    } else {
        branch_and_bound(&program, pool, m, &root.primal)?
    };

    let chosen: Vec<Vec<ObsId>> = selected.iter().map(|&j| pool.columns()[j].members().to_vec()).collect();
    let before: usize = chosen.iter().map(|c| c.len()).sum();
    let repaired = repair_overlaps(instance, &chosen);
    let after: usize = repaired.iter().map(|c| c.len()).sum();
    let clustering = Clustering::from_packing(instance, &repaired)?;
    Ok(Integerization {
        clustering,
        lp_objective,
        lp_integral,
        bnb_nodes,
        proven_optimal,
        selected,
        repairs: before - after,
    })
}

fn is_integral(v: f64) -> bool {
    v.abs() <= INTEGRALITY_TOL || (v - 1.0).abs() <= INTEGRALITY_TOL
}

/// Depth-first branch-and-bound on the most fractional column weight.
fn branch_and_bound(
    program: &LinearProgram,
    pool: &ColumnPool,
    m: usize,
    root_primal: &[f64],
) -> Result<(Vec<usize>, usize, bool), SolverError> {
    let (mut best_sel, mut best_value) = greedy_packing(pool);
    let mut stack: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut nodes = 1;
    push_children(&mut stack, &[], root_primal, m);

    while let Some(fixes) = stack.pop() {
        if nodes >= BNB_NODE_LIMIT {
            return Ok((best_sel, nodes, false));
        }
        nodes += 1;
        let mut node = program.clone();
        for &(j, v) in &fixes {
            node.set_bounds(j, v, v);
        }
        let sol = match lp::solve(&node) {
            Ok(s) => s,
            Err(LpError::Infeasible) => continue,
            Err(e) => return Err(e.into()),
        };
        if sol.objective >= best_value - 1e-9 {
            continue;
        }
        if sol.primal[..m].iter().all(|&g| is_integral(g)) {
            best_value = sol.objective;
            best_sel = (0..m).filter(|&j| sol.primal[j] > 0.5).collect();
            continue;
        }
        push_children(&mut stack, &fixes, &sol.primal, m);
    }
    Ok((best_sel, nodes, true))
}

fn push_children(stack: &mut Vec<Vec<(usize, f64)>>, fixes: &[(usize, f64)], primal: &[f64], m: usize) {
    let branch = (0..m)
        .filter(|&j| !is_integral(primal[j]))
        .min_by(|&a, &b| {
            let fa = (primal[a] - 0.5).abs();
            let fb = (primal[b] - 0.5).abs();
            fa.total_cmp(&fb).then(a.cmp(&b))
        })
        .expect("called on a fractional solution");
    for value in [0.0, 1.0] {
        let mut child = fixes.to_vec();
        child.push((branch, value));
        stack.push(child);
    }
}

/// Cheapest-first disjoint selection of negative-cost columns.
fn greedy_packing(pool: &ColumnPool) -> (Vec<usize>, f64) {
    let mut order: Vec<usize> = (0..pool.len()).collect();
    order.sort_by(|&a, &b| pool.columns()[a].cost().total_cmp(&pool.columns()[b].cost()).then(a.cmp(&b)));
    let mut used = std::collections::HashSet::new();
    let mut picked = Vec::new();
    let mut value = 0.0;
    for j in order {
        let col = &pool.columns()[j];
        if col.cost() >= 0.0 {
            break;
        }
        if col.members().iter().all(|d| !used.contains(d)) {
            used.extend(col.members().iter().copied());
            picked.push(j);
            value += col.cost();
        }
    }
    picked.sort_unstable();
    (picked, value)
}

/// Resolves every doubly covered observation by keeping it in the one
/// covering set that gives the lowest total cost and dropping it from the
/// others. Emptied sets disappear.
pub fn repair_overlaps(instance: &Instance, selected: &[Vec<ObsId>]) -> Vec<Vec<ObsId>> {
    let mut sets: Vec<Vec<ObsId>> = selected
        .iter()
        .map(|s| {
            let mut s = s.clone();
            s.sort_unstable();
            s.dedup();
            s
        })
        .collect();
    let cost = |s: &[ObsId]| hypothesis_cost(instance, s).expect("subsets of feasible sets are feasible");
    loop {
        let mut owners: std::collections::BTreeMap<ObsId, Vec<usize>> = Default::default();
        for (k, s) in sets.iter().enumerate() {
            for &d in s {
                owners.entry(d).or_default().push(k);
            }
        }
        let Some((d, covering)) = owners.into_iter().find(|(_, o)| o.len() > 1) else {
            break;
        };
        let without: Vec<Vec<ObsId>> = covering
            .iter()
            .map(|&k| sets[k].iter().copied().filter(|&x| x != d).collect())
            .collect();
        let with_cost: Vec<f64> = covering.iter().map(|&k| cost(&sets[k])).collect();
        let without_cost: Vec<f64> = without.iter().map(|s| cost(s)).collect();
        let dropped_total: f64 = without_cost.iter().sum();
        let keeper = (0..covering.len())
            .min_by(|&a, &b| {
                let ta = dropped_total - without_cost[a] + with_cost[a];
                let tb = dropped_total - without_cost[b] + with_cost[b];
                ta.total_cmp(&tb).then(a.cmp(&b))
            })
            .expect("at least two owners");
        for (i, &k) in covering.iter().enumerate() {
            if i != keeper {
                sets[k] = without[i].clone();
            }
        }
    }
    sets.retain(|s| !s.is_empty());
    sets
}
