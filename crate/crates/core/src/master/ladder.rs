use crate::instance::ObsId;

use super::ColumnPool;

/// Sorted distinct removal bounds of one observation and the rungs kept
/// as rows of the flexible formulation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ThresholdLadder {
    omega: Vec<f64>,
    selected: Vec<usize>,
}

impl ThresholdLadder {
    /// Ladder over `values` (any order, duplicates allowed) keeping the
    /// largest rung and `k` others spread uniformly: 1-based indices
    /// `ceil(j * |Z| / (k + 1))` for `j = 1..=k+1`.
    pub fn new(mut values: Vec<f64>, k: usize) -> Self {
        values.retain(|&v| v > 0.0);
        values.sort_by(f64::total_cmp);
        values.dedup();
        let len = values.len();
        let mut selected: Vec<usize> = (1..=k + 1)
            .filter(|_| len > 0)
            .map(|j| (j * len).div_ceil(k + 1) - 1)
            .collect();
        selected.dedup();
        ThresholdLadder { omega: values, selected }
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    /// All distinct values, ascending.
    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    /// `omega[0]`, then successive differences.
    pub fn increments(&self) -> Vec<f64> {
        increments_of(self.omega.iter().copied())
    }

    /// Indices into `omega` of the kept rungs, ascending; the last is always
    /// the largest value.
    pub fn selected(&self) -> &[usize] {
        &self.selected
    }

    pub fn selected_omega(&self) -> Vec<f64> {
        self.selected.iter().map(|&i| self.omega[i]).collect()
    }

    /// Increments between consecutive kept rungs; they sum to each kept
    /// value, so a column rounded to rung `r` pays exactly `selected_omega[r]`.
    pub fn selected_increments(&self) -> Vec<f64> {
        increments_of(self.selected.iter().map(|&i| self.omega[i]))
    }

    /// Kept rung that a bound `xi` rounds up to, i.e. the smallest kept value
    /// `>= xi`.
    pub fn rung_for(&self, xi: f64) -> Option<usize> {
        let r = self.selected.partition_point(|&i| self.omega[i] < xi);
        (r < self.selected.len()).then_some(r)
    }

    /// The rounded-up bound of `xi`.
    pub fn rounded(&self, xi: f64) -> Option<f64> {
        self.rung_for(xi).map(|r| self.omega[self.selected[r]])
    }
}

fn increments_of(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut prev = 0.0;
    values
        .map(|v| {
            let inc = v - prev;
            prev = v;
            inc
        })
        .collect()
}

/// One ladder per observation from the removal bounds cached on the pool.
pub fn build_ladders(n_observations: usize, pool: &ColumnPool, k: usize) -> Vec<ThresholdLadder> {
    let mut values: Vec<Vec<f64>> = vec![Vec::new(); n_observations];
    for col in pool.columns() {
        for (d, xi) in col.xi_by_member() {
            values[d as ObsId].push(xi);
        }
    }
    values.into_iter().map(|v| ThresholdLadder::new(v, k)).collect()
}
