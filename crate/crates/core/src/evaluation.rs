//! Performance measures: empirical distortion, silhouette index, majority-vote
//! accuracy and matcher-call accounting.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Representation;
use crate::matching::GraphMetric;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Std,
    Acc,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Std => "std",
            Algorithm::Acc => "acc",
        }
    }
}

/// Bookkeeping for one pass through the training set.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CycleStats {
    /// 1-based.
    pub cycle: usize,
    /// Half the sum of each graph's distance to its winner at the time it was
    /// presented (the upper bound `u` for the accelerated loop).
    pub distortion: f64,
    pub matcher_calls: u64,
    pub pruned_c1: u64,
    pub pruned_c2: u64,
    pub delta_max: f64,
    pub stale_count: usize,
    pub bound_violations: u64,
    pub wrong_prunes: u64,
    pub theta_violations: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Totals {
    /// Graph distance computations made by the training cycles.
    pub matcher_calls: u64,
    /// Distance computations spent on codebook initialization.
    pub init_calls: u64,
    /// Distance computations spent on final evaluation.
    pub eval_calls: u64,
    pub pruned_c1: u64,
    pub pruned_c2: u64,
    pub bound_violations: u64,
    pub wrong_prunes: u64,
    pub theta_violations: u64,
    /// Largest `u(X) − d(X, Y_X)` seen for a bound that was trusted as fresh.
    pub max_fresh_excess: f64,
    pub sinkhorn_warnings: u64,
    pub notes: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FinalMetrics {
    pub distortion: f64,
    /// `None` when the dataset carries no labels.
    pub accuracy: Option<f64>,
    /// `None` when fewer than two clusters are populated.
    pub silhouette: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub algorithm: Algorithm,
    pub k: usize,
    pub n_graphs: usize,
    pub per_cycle: Vec<CycleStats>,
    pub totals: Totals,
    #[serde(rename = "final")]
    pub final_metrics: FinalMetrics,
    /// Nearest code graph of every training graph after training.
    pub encodings: Vec<usize>,
}

/// Index and alignment cost of the nearest code graph (ties to the lowest index).
pub(crate) fn nearest_code(
    x: &Representation,
    codes: &[Representation],
    metric: &GraphMetric,
) -> Result<(usize, f64)> {
    let mut best = (0, f64::INFINITY);
    for (j, y) in codes.iter().enumerate() {
        let d = metric.distance(y, x)?.cost;
        if d < best.1 {
            best = (j, d);
        }
    }
    Ok(best)
}

/// `½ Σᵢ minⱼ d(Xᵢ, Yⱼ)`.
pub fn empirical_distortion(graphs: &[Representation], codes: &[Representation], metric: &GraphMetric) -> Result<f64> {
    if graphs.is_empty() {
        return Err(Error::InvalidArgument("empirical distortion of an empty set".into()));
    }
    if codes.is_empty() {
        return Err(Error::InvalidArgument("empirical distortion needs a nonempty codebook".into()));
    }
    let mut sum = 0.0;
    for x in graphs {
        sum += nearest_code(x, codes, metric)?.1;
    }
    Ok(0.5 * sum)
}

/// Symmetric matrix of pairwise graph distances, filled in parallel from the upper triangle.
pub fn distance_matrix(graphs: &[Representation], metric: &GraphMetric) -> Result<Vec<Vec<f64>>> {
    let n = graphs.len();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (i + 1..n)
                .map(|j| metric.distance(&graphs[i], &graphs[j]).map(|a| a.cost))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let mut dist = vec![vec![0.0; n]; n];
    for (i, row) in rows.into_iter().enumerate() {
        for (off, d) in row.into_iter().enumerate() {
            let j = i + 1 + off;
            dist[i][j] = d;
            dist[j][i] = d;
        }
    }
    Ok(dist)
}

/// Silhouette index: the mean over clusters of the mean silhouette width of
/// their members. A member of a singleton cluster has width 0.
pub fn silhouette_index(distances: &[Vec<f64>], clusters: &[usize]) -> Result<f64> {
    let n = clusters.len();
    if distances.len() != n || distances.iter().any(|row| row.len() != n) {
        return Err(Error::Dimension(format!("distance matrix does not match {n} cluster ids")));
    }
    let mut members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &c) in clusters.iter().enumerate() {
        members.entry(c).or_default().push(i);
    }
    if members.len() < 2 {
        return Err(Error::InvalidArgument("silhouette index needs at least two clusters".into()));
    }

    let avg = |i: usize, set: &[usize]| -> f64 {
        let (sum, count) = set.iter().filter(|&&j| j != i).fold((0.0, 0usize), |(s, c), &j| (s + distances[i][j], c + 1));
        sum / count as f64
    };

    let mut index = 0.0;
    for (&c, own) in &members {
        let mut cluster_sum = 0.0;
        for &i in own {
            if own.len() == 1 {
                continue;
            }
            let a = avg(i, own);
            let b = members
                .iter()
                .filter(|(&other, _)| other != c)
                .map(|(_, set)| avg(i, set))
                .fold(f64::INFINITY, f64::min);
            let denom = a.max(b);
            if denom > 0.0 {
                cluster_sum += (b - a) / denom;
            }
        }
        index += cluster_sum / own.len() as f64;
    }
    Ok(index / members.len() as f64)
}

/// Fraction of graphs whose cluster's majority label equals their own label.
/// Majority ties go to the label that sorts first.
pub fn classification_accuracy(encodings: &[usize], labels: &[String]) -> Result<f64> {
    if labels.is_empty() || labels.iter().all(|l| l.is_empty()) {
        return Err(Error::InvalidArgument("accuracy needs labels".into()));
    }
    if encodings.len() != labels.len() {
        return Err(Error::Dimension(format!("{} encodings vs {} labels", encodings.len(), labels.len())));
    }
    let mut votes: BTreeMap<usize, BTreeMap<&str, usize>> = BTreeMap::new();
    for (&c, label) in encodings.iter().zip(labels) {
        *votes.entry(c).or_default().entry(label.as_str()).or_default() += 1;
    }
    let correct: usize = votes
        .values()
        // the tie rule picks which label wins, not how many members it covers
        .map(|tally| tally.values().copied().max().unwrap_or(0))
        .sum();
    Ok(correct as f64 / labels.len() as f64)
}

/// How many times fewer graph distances the accelerated run needed.
pub fn speedup(std_calls: u64, acc_calls: u64) -> Result<f64> {
    if acc_calls == 0 {
        return Err(Error::DivisionByZero("accelerated run made no matcher calls"));
    }
    Ok(std_calls as f64 / acc_calls as f64)
}

/// Final distortion, encodings, accuracy and silhouette of a trained codebook.
pub(crate) fn evaluate(
    graphs: &[Representation],
    labels: &[String],
    codes: &[Representation],
    metric: &GraphMetric,
) -> Result<(FinalMetrics, Vec<usize>)> {
    let mut encodings = Vec::with_capacity(graphs.len());
    let mut sum = 0.0;
    for x in graphs {
        let (j, d) = nearest_code(x, codes, metric)?;
        encodings.push(j);
        sum += d;
    }
    let accuracy = classification_accuracy(&encodings, labels).ok();
    let populated: BTreeSet<usize> = encodings.iter().copied().collect();
    let silhouette = if populated.len() >= 2 {
        Some(silhouette_index(&distance_matrix(graphs, metric)?, &encodings)?)
    } else {
        None
    };
    Ok((FinalMetrics { distortion: 0.5 * sum, accuracy, silhouette }, encodings))
}
