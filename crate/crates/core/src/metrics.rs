//! External clustering metrics: pairwise precision/recall/F1, V-measure,
//! adjusted Rand index and Fowlkes-Mallows.
//!
//! Entropies use the natural logarithm. Conventions for degenerate inputs
//! follow scikit-learn.

use std::collections::{BTreeMap, HashMap};
use std::hash::Hash;

use serde::Serialize;

use crate::error::MetricsError;
use crate::instance::ObsId;

/// Cluster label of every observation, relabeled densely in order of first
/// appearance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledPartition {
    labels: Vec<usize>,
    n_clusters: usize,
}

impl LabeledPartition {
    pub fn from_labels<T: Hash + Eq>(labels: &[T]) -> Self {
        let mut ids: HashMap<&T, usize> = HashMap::new();
        let labels: Vec<usize> = labels
            .iter()
            .map(|l| {
                let next = ids.len();
                *ids.entry(l).or_insert(next)
            })
            .collect();
        LabeledPartition { labels, n_clusters: ids.len() }
    }

    /// From disjoint clusters covering `0..n` exactly.
    pub fn from_clusters(clusters: &[Vec<ObsId>]) -> Self {
        let n = clusters.iter().map(|c| c.len()).sum();
        let mut labels = vec![usize::MAX; n];
        for (k, c) in clusters.iter().enumerate() {
            for &d in c {
                labels[d] = k;
            }
        }
        Self::from_labels(&labels)
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_clusters(&self) -> usize {
        self.n_clusters
    }

    fn sizes(&self) -> Vec<u64> {
        let mut sizes = vec![0u64; self.n_clusters];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairwiseScores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VMeasure {
    pub homogeneity: f64,
    pub completeness: f64,
    pub v_measure: f64,
}

/// Every metric at once, as reported by the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Report {
    #[serde(flatten)]
    pub pairwise: PairwiseScores,
    #[serde(flatten)]
    pub v: VMeasure,
    pub adjusted_rand: f64,
    pub fowlkes_mallows: f64,
}

pub fn report(pred: &LabeledPartition, truth: &LabeledPartition) -> Result<Report, MetricsError> {
    Ok(Report {
        pairwise: pairwise_prf(pred, truth)?,
        v: v_measure(pred, truth)?,
        adjusted_rand: adjusted_rand(pred, truth)?,
        fowlkes_mallows: fowlkes_mallows(pred, truth)?,
    })
}

/// Pair counts: co-clustered in both, in `pred`, in `truth`, and all pairs.
struct PairCounts {
    both: u64,
    pred: u64,
    truth: u64,
    total: u64,
}

fn choose2(k: u64) -> u64 {
    k * k.saturating_sub(1) / 2
}

fn contingency(pred: &LabeledPartition, truth: &LabeledPartition) -> Result<BTreeMap<(usize, usize), u64>, MetricsError> {
    if pred.len() != truth.len() {
        return Err(MetricsError::UniverseMismatch { pred: pred.len(), truth: truth.len() });
    }
    let mut table = BTreeMap::new();
    for (&p, &t) in pred.labels.iter().zip(&truth.labels) {
        *table.entry((p, t)).or_insert(0u64) += 1;
    }
    Ok(table)
}

fn pair_counts(pred: &LabeledPartition, truth: &LabeledPartition) -> Result<PairCounts, MetricsError> {
    let table = contingency(pred, truth)?;
    Ok(PairCounts {
        both: table.values().map(|&c| choose2(c)).sum(),
        pred: pred.sizes().into_iter().map(choose2).sum(),
        truth: truth.sizes().into_iter().map(choose2).sum(),
        total: choose2(pred.len() as u64),
    })
}

fn ratio(num: u64, den: u64, other_den: u64) -> f64 {
    match (den, other_den) {
        (0, 0) => 1.0,
        (0, _) => 0.0,
        _ => num as f64 / den as f64,
    }
}

/// Precision and recall over unordered co-clustered pairs. An empty pair set
/// scores 1 when the other side is empty too and 0 otherwise.
pub fn pairwise_prf(pred: &LabeledPartition, truth: &LabeledPartition) -> Result<PairwiseScores, MetricsError> {
    let c = pair_counts(pred, truth)?;
    let precision = ratio(c.both, c.pred, c.truth);
    let recall = ratio(c.both, c.truth, c.pred);
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    Ok(PairwiseScores { precision, recall, f1 })
}

pub fn fowlkes_mallows(pred: &LabeledPartition, truth: &LabeledPartition) -> Result<f64, MetricsError> {
    let s = pairwise_prf(pred, truth)?;
    Ok((s.precision * s.recall).sqrt())
}

fn entropy(sizes: &[u64], n: f64) -> f64 {
    sizes
        .iter()
        .filter(|&&s| s > 0)
        .map(|&s| {
            let p = s as f64 / n;
            -p * p.ln()
        })
        .sum()
}

pub fn v_measure(pred: &LabeledPartition, truth: &LabeledPartition) -> Result<VMeasure, MetricsError> {
    let table = contingency(pred, truth)?;
    let n = pred.len() as f64;
    if pred.is_empty() {
        return Ok(VMeasure { homogeneity: 1.0, completeness: 1.0, v_measure: 1.0 });
    }
    let pred_sizes = pred.sizes();
    let truth_sizes = truth.sizes();
    let h_truth = entropy(&truth_sizes, n);
    let h_pred = entropy(&pred_sizes, n);
    // H(truth | pred) and H(pred | truth).
    let mut h_truth_given_pred = 0.0;
    let mut h_pred_given_truth = 0.0;
    for (&(p, t), &c) in &table {
        let c = c as f64;
        h_truth_given_pred -= c / n * (c / pred_sizes[p] as f64).ln();
        h_pred_given_truth -= c / n * (c / truth_sizes[t] as f64).ln();
    }
    let homogeneity = if h_truth == 0.0 { 1.0 } else { 1.0 - h_truth_given_pred / h_truth };
    let completeness = if h_pred == 0.0 { 1.0 } else { 1.0 - h_pred_given_truth / h_pred };
    let v_measure = if homogeneity + completeness == 0.0 {
        0.0
    } else {
        2.0 * homogeneity * completeness / (homogeneity + completeness)
    };
    Ok(VMeasure { homogeneity, completeness, v_measure })
}

/// Pair-confusion form of the adjusted Rand index.
pub fn adjusted_rand(pred: &LabeledPartition, truth: &LabeledPartition) -> Result<f64, MetricsError> {
    let c = pair_counts(pred, truth)?;
    let tp = c.both as f64;
    let fp = (c.pred - c.both) as f64;
    let fn_ = (c.truth - c.both) as f64;
    let tn = (c.total + c.both - c.pred - c.truth) as f64;
    if fp == 0.0 && fn_ == 0.0 {
        return Ok(1.0);
    }
    let num = 2.0 * (tn * tp - fn_ * fp);
    let den = (tp + fn_) * (fn_ + tn) + (tp + fp) * (fp + tn);
    Ok(if den == 0.0 { 0.0 } else { num / den })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lp(labels: &[usize]) -> LabeledPartition {
        LabeledPartition::from_labels(labels)
    }

    #[test]
    fn identical_partitions() {
        let a = lp(&[0, 0, 1, 2, 2, 2]);
        let b = lp(&[7, 7, 3, 9, 9, 9]);
        let r = report(&a, &b).unwrap();
        assert_eq!(r.pairwise, PairwiseScores { precision: 1.0, recall: 1.0, f1: 1.0 });
        assert_eq!(r.v.v_measure, 1.0);
        assert_eq!(r.adjusted_rand, 1.0);
        assert_eq!(r.fowlkes_mallows, 1.0);
    }

    #[test]
    fn split_triangle() {
        let truth = lp(&[0, 0, 0]);
        let pred = lp(&[0, 0, 1]);
        let s = pairwise_prf(&pred, &truth).unwrap();
        assert_eq!(s.precision, 1.0);
        assert!((s.recall - 1.0 / 3.0).abs() < 1e-12);
        assert!((s.f1 - 0.5).abs() < 1e-12);
        let fm = fowlkes_mallows(&pred, &truth).unwrap();
        assert!((fm - 0.5773502691896257).abs() < 1e-12);
    }

    #[test]
    fn all_singletons_both_sides() {
        let a = lp(&[0, 1, 2]);
        let s = pairwise_prf(&a, &a).unwrap();
        assert_eq!(s, PairwiseScores { precision: 1.0, recall: 1.0, f1: 1.0 });
        let b = lp(&[0, 0, 2]);
        let s = pairwise_prf(&a, &b).unwrap();
        assert_eq!((s.precision, s.recall, s.f1), (0.0, 0.0, 0.0));
        assert_eq!(fowlkes_mallows(&a, &b).unwrap(), 0.0);
    }

    #[test]
    fn v_measure_single_predicted_cluster() {
        let pred = lp(&[0, 0, 0, 0]);
        let truth = lp(&[0, 0, 1, 1]);
        let v = v_measure(&pred, &truth).unwrap();
        assert_eq!((v.homogeneity, v.completeness, v.v_measure), (0.0, 1.0, 0.0));
        let singletons = lp(&[0, 1, 2, 3]);
        assert_eq!(v_measure(&singletons, &truth).unwrap().homogeneity, 1.0);
    }

    #[test]
    fn complement_partition_ari() {
        let truth = lp(&[0, 0, 1, 1]);
        let pred = lp(&[0, 1, 0, 1]);
        assert!((adjusted_rand(&pred, &truth).unwrap() + 0.5).abs() < 1e-12);
    }

    #[test]
    fn scikit_learn_reference_values() {
        let truth = lp(&[0, 0, 0, 1, 1, 2]);
        let pred = lp(&[0, 0, 1, 1, 2, 2]);
        let v = v_measure(&pred, &truth).unwrap();
        assert!((v.homogeneity - 0.5431123473589423).abs() < 1e-12);
        assert!((v.completeness - 0.5).abs() < 1e-12);
        assert!((v.v_measure - 0.5206652463984817).abs() < 1e-12);
        assert!((adjusted_rand(&pred, &truth).unwrap() - 0.07407407407407407).abs() < 1e-12);
        assert!((fowlkes_mallows(&pred, &truth).unwrap() - 0.28867513459481287).abs() < 1e-12);
    }

    #[test]
    fn universe_mismatch() {
        assert_eq!(
            adjusted_rand(&lp(&[0, 1]), &lp(&[0])),
            Err(MetricsError::UniverseMismatch { pred: 2, truth: 1 })
        );
    }

    #[test]
    fn from_clusters_matches_labels() {
        let p = LabeledPartition::from_clusters(&[vec![0, 2], vec![1], vec![3, 4]]);
        assert_eq!(p.labels(), &[0, 1, 0, 2, 2]);
        assert_eq!(p.n_clusters(), 3);
    }

    proptest! {
        #[test]
        fn label_permutation_invariance(labels in prop::collection::vec(0usize..4, 1..20), other in prop::collection::vec(0usize..4, 1..20), shift in 1usize..5) {
            let n = labels.len().min(other.len());
            let a = lp(&labels[..n]);
            let b = lp(&other[..n]);
            let renamed: Vec<usize> = labels[..n].iter().map(|l| (l + shift) * 3).collect();
            let a2 = lp(&renamed);
            prop_assert_eq!(report(&a, &b).unwrap(), report(&a2, &b).unwrap());
        }

        #[test]
        fn ranges(labels in prop::collection::vec(0usize..5, 2..30), other in prop::collection::vec(0usize..5, 2..30)) {
            let n = labels.len().min(other.len());
            let r = report(&lp(&labels[..n]), &lp(&other[..n])).unwrap();
            for v in [r.pairwise.precision, r.pairwise.recall, r.pairwise.f1, r.v.homogeneity, r.v.completeness, r.v.v_measure, r.fowlkes_mallows] {
                prop_assert!((-1e-12..=1.0 + 1e-12).contains(&v));
            }
            prop_assert!((-1.0..=1.0).contains(&r.adjusted_rand));
        }
    }
}
