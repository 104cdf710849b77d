//! Competitive learning with triangle-inequality pruning.
//!
//! Each training graph `X` carries an upper bound `u(X) ≥ d(X, Y_X)` on the
//! distance to its encoding, lower bounds `l(X, Y) ≤ d(X, Y)` for every code
//! graph, and the representation `x_a` of `X` that was optimally aligned with
//! its encoding at the last distance computation. A code graph `Y` is skipped
//! whenever `Y = Y_X` or `u(X) ≤ l(X, Y)`.
//!
//! Bounds are widened by how far the code graphs moved. Under
//! [`DeltaMode::PathLength`] this happens each time a graph is presented, using
//! the path every code graph travelled since that graph's previous
//! presentation, so the bounds hold against the codebook the graph is
//! actually classified with. The other modes widen all bounds once at the end
//! of each cycle.

use rand_chacha::ChaCha8Rng;

use super::{check_inputs, init_furthest_first, learning_rate, rngs, shuffled, Codebook, DeltaMode, TrainConfig};
use crate::error::Result;
use crate::evaluation::{evaluate, Algorithm, CycleStats, Totals, TrainReport};
use crate::graph::Representation;
use crate::matching::{Alignment, GraphMetric, Matcher};

/// Absolute slack used when auditing bounds against exact distances.
pub const AUDIT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct BoundsState {
    k: usize,
    pub upper: Vec<f64>,
    pub stale: Vec<bool>,
    /// Row-major `N × k`.
    lower: Vec<f64>,
    pub encoding: Vec<Option<usize>>,
    pub aligned: Vec<Representation>,
    /// Row-major `N × k`: code graph odometer readings at the graph's last synchronization.
    synced: Vec<f64>,
}

impl BoundsState {
    /// Every upper bound starts at infinity and out of date; no graph has an encoding yet.
    pub fn new(graphs: &[Representation], k: usize) -> Self {
        let n = graphs.len();
        Self {
            k,
            upper: vec![f64::INFINITY; n],
            stale: vec![true; n],
            lower: vec![0.0; n * k],
            encoding: vec![None; n],
            aligned: graphs.to_vec(),
            synced: vec![0.0; n * k],
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn lower(&self, i: usize, j: usize) -> f64 {
        self.lower[i * self.k + j]
    }

    pub fn set_lower(&mut self, i: usize, j: usize, value: f64) {
        self.lower[i * self.k + j] = value;
    }

    pub fn stale_count(&self) -> usize {
        self.stale.iter().filter(|&&s| s).count()
    }
}

/// Per-call bookkeeping of [`classify`], accumulated over a cycle.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ClassifyCounters {
    pub matcher_calls: u64,
    pub pruned_c1: u64,
    pub pruned_c2: u64,
    pub bound_violations: u64,
    pub wrong_prunes: u64,
    pub theta_violations: u64,
    pub max_fresh_excess: f64,
}

/// Checks bounds and pruning decisions against exact distances.
#[derive(Debug)]
pub struct BoundAudit {
    metric: GraphMetric,
    theta: f64,
}

impl BoundAudit {
    pub fn new(theta: f64) -> Self {
        Self { metric: GraphMetric::new(Matcher::exact()), theta }
    }

    fn distances(&self, x: &Representation, codebook: &Codebook) -> Result<Vec<f64>> {
        codebook.reps.iter().map(|y| self.metric.distance(y, x).map(|a| a.cost)).collect()
    }
}

/// Records a fresh distance between graph `i` and code graph `j` and makes
/// `j` its encoding.
pub fn update_bounds(i: usize, j: usize, bounds: &mut BoundsState, x: &Representation, alignment: &Alignment) -> Result<()> {
    bounds.upper[i] = alignment.cost;
    bounds.set_lower(i, j, alignment.cost);
    bounds.stale[i] = false;
    bounds.aligned[i] = alignment.align(x)?;
    bounds.encoding[i] = Some(j);
    Ok(())
}

/// Determines the encoding of training graph `i` with delayed distance evaluation.
///
/// A graph without an encoding is compared with every code graph. Otherwise a
/// code graph is a candidate only if it is not the encoding and `u < l`. For a
/// candidate, an out-of-date upper bound is first refreshed with one distance
/// to the encoding; if the candidate survives, its distance is computed and it
/// takes over the encoding when strictly closer.
pub fn classify(
    i: usize,
    x: &Representation,
    codebook: &Codebook,
    bounds: &mut BoundsState,
    metric: &GraphMetric,
    counters: &mut ClassifyCounters,
    audit: Option<&BoundAudit>,
) -> Result<usize> {
    let truth = audit.map(|a| a.distances(x, codebook)).transpose()?;
    if let (Some(truth), Some(audit)) = (&truth, audit) {
        audit_entry(i, bounds, truth, audit.theta, counters);
    }

    let Some(mut enc) = bounds.encoding[i] else {
        let mut best: Option<(usize, Alignment)> = None;
        for (j, y) in codebook.reps.iter().enumerate() {
            let alignment = metric.distance(y, x)?;
            counters.matcher_calls += 1;
            bounds.set_lower(i, j, alignment.cost);
            if best.as_ref().is_none_or(|(_, b)| alignment.cost < b.cost) {
                best = Some((j, alignment));
            }
        }
        let (j, alignment) = best.expect("codebook is nonempty");
        update_bounds(i, j, bounds, x, &alignment)?;
        return Ok(j);
    };

    let pruned = |j: usize, enc: usize, counters: &mut ClassifyCounters| {
        if let Some(truth) = &truth {
            if truth[enc] > truth[j] + AUDIT_TOLERANCE {
                counters.wrong_prunes += 1;
            }
        }
    };

    for (j, y) in codebook.reps.iter().enumerate() {
        if j == enc {
            counters.pruned_c1 += 1;
            pruned(j, enc, counters);
            continue;
        }
        if bounds.upper[i] <= bounds.lower(i, j) {
            counters.pruned_c2 += 1;
            pruned(j, enc, counters);
            continue;
        }
        if bounds.stale[i] {
            let refreshed = metric.distance(&codebook.reps[enc], x)?;
            counters.matcher_calls += 1;
            update_bounds(i, enc, bounds, x, &refreshed)?;
            if bounds.upper[i] <= bounds.lower(i, j) {
                counters.pruned_c2 += 1;
                pruned(j, enc, counters);
                continue;
            }
        }
        let alignment = metric.distance(y, x)?;
        counters.matcher_calls += 1;
        bounds.set_lower(i, j, alignment.cost);
        if alignment.cost < bounds.upper[i] {
            update_bounds(i, j, bounds, x, &alignment)?;
            enc = j;
        }
    }
    Ok(enc)
}

fn audit_entry(i: usize, bounds: &BoundsState, truth: &[f64], theta: f64, counters: &mut ClassifyCounters) {
    for (j, &d) in truth.iter().enumerate() {
        if bounds.lower(i, j) > d + AUDIT_TOLERANCE {
            counters.bound_violations += 1;
        }
    }
    if let Some(enc) = bounds.encoding[i] {
        let d = truth[enc];
        if bounds.upper[i] < d - AUDIT_TOLERANCE {
            counters.bound_violations += 1;
        }
        if !bounds.stale[i] {
            let excess = bounds.upper[i] - d;
            counters.max_fresh_excess = counters.max_fresh_excess.max(excess);
            if excess > theta + AUDIT_TOLERANCE {
                counters.theta_violations += 1;
            }
        }
    }
}

/// Widens every bound by the movement `deltas[j]` of each code graph:
/// `l ← max(l − δ(Y), 0)`, `u ← min(u + δ(Y_X), ‖x_a − y‖)`, and marks `u`
/// out of date iff `δ(Y_X) > theta`. Returns the number of stale bounds.
pub fn estimate_bounds(bounds: &mut BoundsState, codebook: &Codebook, deltas: &[f64], theta: f64) -> usize {
    for i in 0..bounds.upper.len() {
        widen(i, bounds, codebook, deltas, theta);
    }
    bounds.stale_count()
}

fn widen(i: usize, bounds: &mut BoundsState, codebook: &Codebook, deltas: &[f64], theta: f64) {
    let k = bounds.k;
    for (l, &delta) in bounds.lower[i * k..(i + 1) * k].iter_mut().zip(deltas) {
        *l = (*l - delta).max(0.0);
    }
    if let Some(enc) = bounds.encoding[i] {
        let lifted = bounds.aligned[i].sq_distance_unchecked(&codebook.reps[enc]).sqrt();
        bounds.upper[i] = (bounds.upper[i] + deltas[enc]).min(lifted);
        bounds.stale[i] = deltas[enc] > theta;
    }
}

/// Widens the bounds of graph `i` by the distance each code graph travelled
/// since the previous call for `i`, as read off the cumulative `odometer`.
/// Returns whether the upper bound ended up out of date.
pub fn synchronize(i: usize, bounds: &mut BoundsState, codebook: &Codebook, odometer: &[f64], theta: f64) -> bool {
    let k = bounds.k;
    let deltas: Vec<f64> =
        odometer.iter().zip(&bounds.synced[i * k..(i + 1) * k]).map(|(now, then)| now - then).collect();
    widen(i, bounds, codebook, &deltas, theta);
    bounds.synced[i * k..(i + 1) * k].copy_from_slice(odometer);
    bounds.stale[i]
}

pub fn train_accelerated(
    graphs: &[Representation],
    labels: &[String],
    config: &TrainConfig,
) -> Result<(Codebook, TrainReport)> {
    check_inputs(graphs, labels, config)?;
    let (mut init_rng, mut order_rng) = rngs(config.seed);
    let init_metric = GraphMetric::new(config.matcher.clone());
    let (codebook, _) = init_furthest_first(graphs, config.k, &init_metric, config.mean_passes, &mut init_rng)?;
    train_accelerated_from(graphs, labels, config, codebook, init_metric.calls(), &mut order_rng)
}

pub(crate) fn train_accelerated_from(
    graphs: &[Representation],
    labels: &[String],
    config: &TrainConfig,
    mut codebook: Codebook,
    init_calls: u64,
    order_rng: &mut ChaCha8Rng,
) -> Result<(Codebook, TrainReport)> {
    let metric = GraphMetric::new(config.matcher.clone());
    let audit = config.instrument_bounds.then(|| BoundAudit::new(config.theta));
    let mut bounds = BoundsState::new(graphs, codebook.k());
    let mut per_cycle = Vec::with_capacity(config.cycles);
    let mut totals = Totals::default();
    let lazy = config.delta_mode == DeltaMode::PathLength;
    let mut odometer = vec![0.0; codebook.k()];

    for cycle in 0..config.cycles {
        codebook.snapshot();
        let calls_before = metric.calls();
        let mut counters = ClassifyCounters::default();
        let mut path = vec![0.0; codebook.k()];
        let mut online = 0.0;
        let mut stale_seen = 0;
        for i in shuffled(graphs.len(), order_rng) {
            if lazy && synchronize(i, &mut bounds, &codebook, &odometer, config.theta) {
                stale_seen += 1;
            }
            let enc = classify(i, &graphs[i], &codebook, &mut bounds, &metric, &mut counters, audit.as_ref())?;
            online += bounds.upper[i];
            let eta = learning_rate(config.lr, codebook.win_counts[enc], cycle);
            let step = codebook.update(enc, &bounds.aligned[i], eta)?;
            path[enc] += step;
            odometer[enc] += step;
        }

        let deltas = match config.delta_mode {
            DeltaMode::PathLength => path,
            DeltaMode::Displacement => codebook.displacements(),
            DeltaMode::GraphDistance => codebook
                .prev_reps
                .iter()
                .zip(&codebook.reps)
                .map(|(prev, y)| metric.distance(prev, y).map(|a| a.cost))
                .collect::<Result<_>>()?,
        };
        let stale_count =
            if lazy { stale_seen } else { estimate_bounds(&mut bounds, &codebook, &deltas, config.theta) };
        if config.corrupt_lower_bounds {
            bounds.lower.iter_mut().for_each(|l| *l += 1e3);
        }

        totals.pruned_c1 += counters.pruned_c1;
        totals.pruned_c2 += counters.pruned_c2;
        totals.bound_violations += counters.bound_violations;
        totals.wrong_prunes += counters.wrong_prunes;
        totals.theta_violations += counters.theta_violations;
        totals.max_fresh_excess = totals.max_fresh_excess.max(counters.max_fresh_excess);
        per_cycle.push(CycleStats {
            cycle: cycle + 1,
            distortion: 0.5 * online,
            matcher_calls: metric.calls() - calls_before,
            pruned_c1: counters.pruned_c1,
            pruned_c2: counters.pruned_c2,
            delta_max: deltas.iter().copied().fold(0.0, f64::max),
            stale_count,
            bound_violations: counters.bound_violations,
            wrong_prunes: counters.wrong_prunes,
            theta_violations: counters.theta_violations,
        });
    }

    let eval_metric = GraphMetric::new(config.matcher.clone());
    let (final_metrics, encodings) = evaluate(graphs, labels, &codebook.reps, &eval_metric)?;
    totals.matcher_calls = metric.calls();
    totals.init_calls = init_calls;
    totals.eval_calls = eval_metric.calls();
    totals.sinkhorn_warnings = metric.sinkhorn_warnings();
    totals.notes = format!("matcher={} theta={} delta={:?}", config.matcher.name(), config.theta, config.delta_mode);
    let report = TrainReport {
        algorithm: Algorithm::Acc,
        k: config.k,
        n_graphs: graphs.len(),
        per_cycle,
        totals,
        final_metrics,
        encodings,
    };
    Ok((codebook, report))
}
