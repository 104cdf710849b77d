use rand::seq::SliceRandom;
use rand::Rng;

use super::Codebook;
use crate::error::{Error, Result};
use crate::graph::Representation;
use crate::matching::GraphMetric;

/// Incremental alignment mean: start from `S[0]`, then repeatedly align the
/// next graph to the running mean and fold it in with weight `1/t`.
///
/// The first pass visits `S[1..]` in order; later passes visit all of `S` in
/// random order.
pub fn approx_sample_mean<R: Rng>(
    graphs: &[Representation],
    metric: &GraphMetric,
    passes: usize,
    rng: &mut R,
) -> Result<Representation> {
    let Some(first) = graphs.first() else {
        return Err(Error::InvalidArgument("sample mean of an empty set".into()));
    };
    let mut mean = first.clone();
    let mut count = 1.0;
    let mut order: Vec<usize> = (1..graphs.len()).collect();
    for pass in 0..passes {
        if pass > 0 {
            order = (0..graphs.len()).collect();
            order.shuffle(rng);
        }
        for &i in &order {
            let alignment = metric.distance(&mean, &graphs[i])?;
            let aligned = alignment.align(&graphs[i])?;
            count += 1.0;
            mean.move_toward(&aligned, 1.0 / count)?;
        }
    }
    Ok(mean)
}

/// Furthest-first seeding: the first code graph is the training graph closest
/// to the sample mean, each further one maximizes the distance to the code
/// graphs chosen so far. Ties go to the lowest training index.
pub fn init_furthest_first<R: Rng>(
    graphs: &[Representation],
    k: usize,
    metric: &GraphMetric,
    mean_passes: usize,
    rng: &mut R,
) -> Result<(Codebook, Vec<usize>)> {
    if k == 0 || k > graphs.len() {
        return Err(Error::InvalidArgument(format!("cannot pick {k} code graphs from {} graphs", graphs.len())));
    }
    let mean = approx_sample_mean(graphs, metric, mean_passes, rng)?;
    let mut chosen = Vec::with_capacity(k);
    let mut first = (0, f64::INFINITY);
    for (i, x) in graphs.iter().enumerate() {
        let d = metric.distance(&mean, x)?.cost;
        if d < first.1 {
            first = (i, d);
        }
    }
    chosen.push(first.0);

    let mut min_dist = vec![f64::INFINITY; graphs.len()];
    while chosen.len() < k {
        let latest = &graphs[*chosen.last().expect("nonempty")];
        for (i, x) in graphs.iter().enumerate() {
            if !chosen.contains(&i) {
                min_dist[i] = min_dist[i].min(metric.distance(latest, x)?.cost);
            }
        }
        let next = (0..graphs.len())
            .filter(|i| !chosen.contains(i))
            .fold(None, |best: Option<usize>, i| match best {
                Some(b) if min_dist[b] >= min_dist[i] => Some(b),
                _ => Some(i),
            })
            .expect("k <= N leaves a candidate");
        chosen.push(next);
    }
    let codebook = Codebook::new(chosen.iter().map(|&i| graphs[i].clone()).collect())?;
    Ok((codebook, chosen))
}
