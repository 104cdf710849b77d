use super::{check_inputs, init_furthest_first, learning_rate, rngs, shuffled, Codebook, TrainConfig};
use crate::error::Result;
use crate::evaluation::{evaluate, Algorithm, CycleStats, Totals, TrainReport};
use crate::graph::Representation;
use crate::matching::GraphMetric;

/// Plain competitive learning: every presented graph is matched against all
/// `k` code graphs, and the winner moves toward the optimally aligned input.
pub fn train_standard(
    graphs: &[Representation],
    labels: &[String],
    config: &TrainConfig,
) -> Result<(Codebook, TrainReport)> {
    check_inputs(graphs, labels, config)?;
    let (mut init_rng, mut order_rng) = rngs(config.seed);
    let init_metric = GraphMetric::new(config.matcher.clone());
    let (codebook, _) = init_furthest_first(graphs, config.k, &init_metric, config.mean_passes, &mut init_rng)?;
    train_standard_from(graphs, labels, config, codebook, init_metric.calls(), &mut order_rng)
}

pub(crate) fn train_standard_from(
    graphs: &[Representation],
    labels: &[String],
    config: &TrainConfig,
    mut codebook: Codebook,
    init_calls: u64,
    order_rng: &mut rand_chacha::ChaCha8Rng,
) -> Result<(Codebook, TrainReport)> {
    let metric = GraphMetric::new(config.matcher.clone());
    let mut per_cycle = Vec::with_capacity(config.cycles);

    for cycle in 0..config.cycles {
        codebook.snapshot();
        let calls_before = metric.calls();
        let mut online = 0.0;
        for i in shuffled(graphs.len(), order_rng) {
            let x = &graphs[i];
            let mut winner: Option<(usize, crate::matching::Alignment)> = None;
            for (j, y) in codebook.reps.iter().enumerate() {
                let alignment = metric.distance(y, x)?;
                if winner.as_ref().is_none_or(|(_, best)| alignment.cost < best.cost) {
                    winner = Some((j, alignment));
                }
            }
            let (j, alignment) = winner.expect("codebook is nonempty");
            online += alignment.cost;
            let aligned = alignment.align(x)?;
            let eta = learning_rate(config.lr, codebook.win_counts[j], cycle);
            codebook.update(j, &aligned, eta)?;
        }
        per_cycle.push(CycleStats {
            cycle: cycle + 1,
            distortion: 0.5 * online,
            matcher_calls: metric.calls() - calls_before,
            delta_max: codebook.displacements().into_iter().fold(0.0, f64::max),
            ..CycleStats::default()
        });
    }

    let eval_metric = GraphMetric::new(config.matcher.clone());
    let (final_metrics, encodings) = evaluate(graphs, labels, &codebook.reps, &eval_metric)?;
    let totals = Totals {
        matcher_calls: metric.calls(),
        init_calls,
        eval_calls: eval_metric.calls(),
        sinkhorn_warnings: metric.sinkhorn_warnings(),
        notes: format!("matcher={}", config.matcher.name()),
        ..Totals::default()
    };
    let report = TrainReport {
        algorithm: Algorithm::Std,
        k: config.k,
        n_graphs: graphs.len(),
        per_cycle,
        totals,
        final_metrics,
        encodings,
    };
    Ok((codebook, report))
}
