//! Quantization of attributed graphs by competitive learning.
//!
//! Graphs are lifted to dense `n × n × r` attribute tensors ([`Representation`]).
//! The graph distance is the minimum Euclidean distance between lifts over
//! all vertex permutations, computed by one of the matchers in [`matching`].
//!
//! Two training loops are provided:
//!
//! * [`train_standard`] evaluates `k` graph distances per training graph and cycle.
//! * [`train_accelerated`] keeps per-graph upper and lower distance bounds and
//!   the most recent optimal alignment of every training graph, and skips
//!   graph distance computations whenever the triangle inequality proves that
//!   a code graph cannot win.
//!
//! Both loops share initialization, presentation order and evaluation, so their
//! [`TrainReport`]s are directly comparable.

pub mod dataset;
pub mod error;
pub mod evaluation;
pub mod graph;
pub mod matching;
pub mod quantizer;

pub use dataset::{generate_synthetic, random_prototypes, Dataset};
pub use error::{Error, Result};
pub use evaluation::{
    classification_accuracy, empirical_distortion, silhouette_index, speedup, Algorithm,
    CycleStats, FinalMetrics, Totals, TrainReport,
};
pub use graph::{pad_to_order, representation_distance, AttributedGraph, Edge, Permutation, Representation};
pub use matching::{
    brute_force_distance, exact_distance, graduated_assignment_distance, Alignment, Cleanup,
    GaParams, GraphMetric, Matcher,
};
pub use quantizer::{
    approx_sample_mean, init_furthest_first, learning_rate, train_accelerated, train_standard,
    BoundsState, Codebook, DeltaMode, LearningRate, TrainConfig,
};
