use std::collections::HashMap;

use crate::error::InstanceError;
use crate::instance::{Column, Instance, ObsId};

use super::compute_xi_dg;

/// Append-only set of distinct feasible columns.
#[derive(Debug, Clone, Default)]
pub struct ColumnPool {
    columns: Vec<Column>,
    index: HashMap<Vec<ObsId>, usize>,
    epsilon: f64,
}

impl ColumnPool {
    pub fn new(epsilon: f64) -> Self {
        ColumnPool {
            columns: Vec::new(),
            index: HashMap::new(),
            epsilon,
        }
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn position(&self, members: &[ObsId]) -> Option<usize> {
        self.index.get(members).copied()
    }

    /// Validates every set first, then appends the ones not already present
    /// with their removal bounds cached. Returns the number appended.
    pub fn add_columns<I>(&mut self, instance: &Instance, sets: I) -> Result<usize, InstanceError>
    where
        I: IntoIterator<Item = Vec<ObsId>>,
    {
        let candidates = sets
            .into_iter()
            .map(|s| Column::new(instance, &s))
            .collect::<Result<Vec<_>, _>>()?;
        let mut added = 0;
        for mut col in candidates {
            if self.index.contains_key(col.members()) {
                continue;
            }
            col.xi = compute_xi_dg(instance, &col, self.epsilon);
            self.index.insert(col.members().to_vec(), self.columns.len());
            self.columns.push(col);
            added += 1;
        }
        Ok(added)
    }
}
