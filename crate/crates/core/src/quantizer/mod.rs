//! Competitive learning graph quantizers.

mod accelerated;
mod init;
mod standard;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Representation;
use crate::matching::Matcher;

pub use accelerated::{
    classify, estimate_bounds, synchronize, train_accelerated, update_bounds, BoundAudit, BoundsState, ClassifyCounters,
    AUDIT_TOLERANCE,
};
pub use init::{approx_sample_mean, init_furthest_first};
pub use standard::train_standard;

/// Step size schedule for code graph updates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LearningRate {
    /// `1 / (wins + 1)`: each code graph is the running mean of its aligned winners.
    Harmonic,
    /// `eta0 · exp(−cycle / tau)` with 0-based cycles.
    ExponentialDecay { eta0: f64, tau: f64 },
}

impl LearningRate {
    pub fn validate(&self) -> Result<()> {
        match *self {
            LearningRate::Harmonic => Ok(()),
            LearningRate::ExponentialDecay { eta0, tau } if eta0 > 0.0 && eta0.is_finite() && tau > 0.0 => Ok(()),
            LearningRate::ExponentialDecay { .. } => {
                Err(Error::InvalidArgument(format!("invalid learning rate schedule {self:?}")))
            }
        }
    }
}

pub fn learning_rate(schedule: LearningRate, win_count: u64, cycle: usize) -> f64 {
    match schedule {
        LearningRate::Harmonic => 1.0 / (win_count as f64 + 1.0),
        LearningRate::ExponentialDecay { eta0, tau } => eta0 * (-(cycle as f64) / tau).exp(),
    }
}

/// How the per-cycle movement δ(Y) of a code graph is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeltaMode {
    /// Total length of the update steps a code graph took since the graph was
    /// last presented, applied lazily at each presentation. Keeps every bound
    /// valid although code graphs move within a cycle.
    #[default]
    PathLength,
    /// `‖y − y′‖` between the cycle's start and end states, applied to all
    /// bounds at the end of the cycle.
    Displacement,
    /// `d(Y, Y′)` computed by the matcher (counted as matcher calls), applied
    /// to all bounds at the end of the cycle.
    GraphDistance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub k: usize,
    pub cycles: usize,
    /// Staleness tolerance: upper bounds stay trusted when δ(Y_X) ≤ theta.
    pub theta: f64,
    pub matcher: Matcher,
    pub lr: LearningRate,
    pub seed: u64,
    /// Audit every bound and pruning decision against exact distances.
    pub instrument_bounds: bool,
    pub delta_mode: DeltaMode,
    /// Passes of the incremental sample mean used to seed initialization.
    pub mean_passes: usize,
    /// Test hook: inflates lower bounds after every cycle so the auditor must fire.
    #[doc(hidden)]
    #[serde(default)]
    pub corrupt_lower_bounds: bool,
}

impl TrainConfig {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            cycles: 150,
            theta: 0.0,
            matcher: Matcher::exact(),
            lr: LearningRate::Harmonic,
            seed: 0,
            instrument_bounds: false,
            delta_mode: DeltaMode::default(),
            mean_passes: 2,
            corrupt_lower_bounds: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidArgument("k must be positive".into()));
        }
        if self.cycles == 0 {
            return Err(Error::InvalidArgument("cycles must be positive".into()));
        }
        if self.theta.is_nan() || self.theta < 0.0 {
            return Err(Error::InvalidArgument(format!("theta must be nonnegative, got {}", self.theta)));
        }
        if self.mean_passes == 0 {
            return Err(Error::InvalidArgument("mean_passes must be positive".into()));
        }
        self.lr.validate()?;
        if let Matcher::GraduatedAssignment(params) = &self.matcher {
            params.validate()?;
        }
        if self.instrument_bounds && !self.matcher.is_exact() {
            return Err(Error::InvalidArgument("bound instrumentation requires an exact matcher".into()));
        }
        Ok(())
    }
}

/// The code graphs together with their cycle-start snapshot and win counters.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    pub reps: Vec<Representation>,
    pub prev_reps: Vec<Representation>,
    pub win_counts: Vec<u64>,
}

impl Codebook {
    pub fn new(reps: Vec<Representation>) -> Result<Self> {
        let Some(first) = reps.first() else {
            return Err(Error::InvalidArgument("a codebook needs at least one code graph".into()));
        };
        if let Some(bad) = reps.iter().find(|y| !y.same_shape(first)) {
            first.check_shape(bad)?;
        }
        Ok(Self { prev_reps: reps.clone(), win_counts: vec![0; reps.len()], reps })
    }

    pub fn k(&self) -> usize {
        self.reps.len()
    }

    pub fn snapshot(&mut self) {
        self.prev_reps.clone_from(&self.reps);
    }

    /// Moves code graph `j` toward `target` and counts the win. Returns the step length.
    pub fn update(&mut self, j: usize, target: &Representation, eta: f64) -> Result<f64> {
        self.win_counts[j] += 1;
        self.reps[j].move_toward(target, eta)
    }

    /// `‖y − y′‖` per code graph.
    pub fn displacements(&self) -> Vec<f64> {
        self.reps
            .iter()
            .zip(&self.prev_reps)
            .map(|(y, prev)| y.sq_distance_unchecked(prev).sqrt())
            .collect()
    }
}

/// Validates the training inputs shared by both training loops.
fn check_inputs(graphs: &[Representation], labels: &[String], config: &TrainConfig) -> Result<()> {
    config.validate()?;
    let Some(first) = graphs.first() else {
        return Err(Error::InvalidArgument("training set is empty".into()));
    };
    if graphs.len() < config.k {
        return Err(Error::InvalidArgument(format!("k = {} exceeds the {} training graphs", config.k, graphs.len())));
    }
    if let Some(bad) = graphs.iter().find(|x| !x.same_shape(first)) {
        first.check_shape(bad)?;
    }
    if !labels.is_empty() && labels.len() != graphs.len() {
        return Err(Error::Dimension(format!("{} labels for {} graphs", labels.len(), graphs.len())));
    }
    Ok(())
}

/// Independent random streams for initialization and presentation order.
fn rngs(seed: u64) -> (ChaCha8Rng, ChaCha8Rng) {
    let mut init = ChaCha8Rng::seed_from_u64(seed);
    init.set_stream(1);
    let mut order = ChaCha8Rng::seed_from_u64(seed);
    order.set_stream(2);
    (init, order)
}

fn shuffled(n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    order
}
