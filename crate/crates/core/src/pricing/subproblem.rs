use crate::instance::{Instance, ObsId};

/// Pricing over a fixed set of nodes: minimize
/// `sum_{d in S} -lambda_d + sum_{ordered pairs in S} theta`
/// over node subsets `S` with no blocked pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Subproblem {
    nodes: Vec<ObsId>,
    lambda: Vec<f64>,
    /// Row-major `k x k`; `Some(2 * theta)` for compatible pairs (both
    /// orientations folded together), `None` for blocked ones.
    weight: Vec<Option<f64>>,
}

impl Subproblem {
    /// Restricts `instance` to `nodes`, reading the aggregate dual of every
    /// node from `lambda` (indexed by global observation id).
    pub fn new(instance: &Instance, nodes: &[ObsId], lambda: &[f64]) -> Self {
        let k = nodes.len();
        let mut weight = vec![None; k * k];
        for i in 0..k {
            weight[i * k + i] = Some(0.0);
            for j in i + 1..k {
                let w = instance.theta(nodes[i], nodes[j]).map(|t| 2.0 * t);
                weight[i * k + j] = w;
                weight[j * k + i] = w;
            }
        }
        Subproblem {
            nodes: nodes.to_vec(),
            lambda: nodes.iter().map(|&d| lambda[d]).collect(),
            weight,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[ObsId] {
        &self.nodes
    }

    pub fn lambda(&self, i: usize) -> f64 {
        self.lambda[i]
    }

    /// Pair term between local nodes `i` and `j` (`2 theta`), `None` when blocked.
    pub fn weight(&self, i: usize, j: usize) -> Option<f64> {
        self.weight[i * self.nodes.len() + j]
    }

    /// Blocked local pairs `(i, j)` with `i < j`.
    pub fn conflicts(&self) -> Vec<(usize, usize)> {
        let k = self.len();
        (0..k)
            .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
            .filter(|&(i, j)| self.weight(i, j).is_none())
            .collect()
    }

    /// Compatible local pairs `(i, j)` with `i < j`.
    pub fn internal_pairs(&self) -> Vec<(usize, usize)> {
        let k = self.len();
        (0..k)
            .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
            .filter(|&(i, j)| self.weight(i, j).is_some())
            .collect()
    }

    /// Objective of a local node set, `None` if it contains a blocked pair.
    pub fn objective(&self, local: &[usize]) -> Option<f64> {
        let mut sorted = local.to_vec();
        sorted.sort_unstable();
        let mut total = 0.0;
        for (a, &i) in sorted.iter().enumerate() {
            total -= self.lambda[i];
            for &j in &sorted[a + 1..] {
                total += self.weight(i, j)?;
            }
        }
        Some(total)
    }

    /// Global ids of a local node set, sorted.
    pub fn to_global(&self, local: &[usize]) -> Vec<ObsId> {
        let mut out: Vec<ObsId> = local.iter().map(|&i| self.nodes[i]).collect();
        out.sort_unstable();
        out
    }
}
