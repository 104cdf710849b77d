//! Graph distance `d(X, Y) = min_π ‖x − π(y)‖` and optimal alignments.
//!
//! Every matcher returns an [`Alignment`] whose permutation acts on the second
//! argument. The reported cost is always recomputed from that permutation, so
//! approximate matchers can only overestimate `d`.

mod assignment;
mod brute;
mod exact;
mod graduated;

use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::graph::{invert, Permutation, Representation};

pub use brute::{brute_force_distance, BRUTE_FORCE_MAX_ORDER};
pub use exact::{exact_distance, exact_distance_with_budget};
pub use graduated::{graduated_assignment_distance, Cleanup, GaParams};

pub(crate) use assignment::{greedy_max_assignment, hungarian_max_assignment};

/// A permutation of the second argument together with the cost it realizes.
#[derive(Debug, Clone, PartialEq)]
pub struct Alignment {
    pub perm: Permutation,
    pub cost: f64,
    /// True iff produced by a matcher that guarantees global optimality.
    pub exact: bool,
}

impl Alignment {
    /// The second argument brought into alignment with the first.
    pub fn align(&self, y: &Representation) -> Result<Representation> {
        y.permute(&self.perm)
    }
}

/// Squared cost of aligning `y` to `x` via permutation `perm` (acting on `y`).
///
/// Summation order matches `x.distance(&y.permute(perm))` exactly.
pub(crate) fn aligned_sq_cost(x: &Representation, y: &Representation, perm: &[usize]) -> f64 {
    let n = x.order();
    let sigma = invert(perm);
    let mut acc = 0.0;
    for a in 0..n {
        for b in 0..n {
            for (u, v) in x.cell(a, b).iter().zip(y.cell(sigma[a], sigma[b])) {
                let d = u - v;
                acc += d * d;
            }
        }
    }
    acc
}

/// Which algorithm computes graph distances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Matcher {
    /// Exhaustive enumeration; order ≤ 8.
    BruteForce,
    /// Depth-first branch and bound, optionally limited in node expansions.
    Exact { node_budget: Option<u64> },
    GraduatedAssignment(GaParams),
}

impl Matcher {
    pub fn exact() -> Self {
        Matcher::Exact { node_budget: None }
    }

    pub fn graduated_assignment() -> Self {
        Matcher::GraduatedAssignment(GaParams::default())
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, Matcher::GraduatedAssignment(_))
    }

    pub fn name(&self) -> &'static str {
        match self {
            Matcher::BruteForce => "brute",
            Matcher::Exact { .. } => "exact",
            Matcher::GraduatedAssignment(_) => "ga",
        }
    }
}

/// A configured matcher plus call accounting.
///
/// Counters are atomic so a metric can be shared across threads; every call to
/// [`GraphMetric::distance`] counts as one graph distance computation.
#[derive(Debug)]
pub struct GraphMetric {
    matcher: Matcher,
    calls: AtomicU64,
    sinkhorn_warnings: AtomicU64,
}

impl GraphMetric {
    pub fn new(matcher: Matcher) -> Self {
        Self { matcher, calls: AtomicU64::new(0), sinkhorn_warnings: AtomicU64::new(0) }
    }

    pub fn matcher(&self) -> &Matcher {
        &self.matcher
    }

    /// Distance between `x` and `y`, with the alignment permuting `y`.
    pub fn distance(&self, x: &Representation, y: &Representation) -> Result<Alignment> {
        self.calls.fetch_add(1, Ordering::Relaxed);
        match &self.matcher {
            Matcher::BruteForce => brute_force_distance(x, y),
            Matcher::Exact { node_budget } => exact_distance_with_budget(x, y, *node_budget),
            Matcher::GraduatedAssignment(params) => {
                let (alignment, stats) = graduated::run(x, y, params)?;
                if stats.sinkhorn_nonconverged > 0 {
                    self.sinkhorn_warnings.fetch_add(stats.sinkhorn_nonconverged, Ordering::Relaxed);
                }
                Ok(alignment)
            }
        }
    }

    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }

    /// Number of Sinkhorn normalizations that hit the iteration cap.
    pub fn sinkhorn_warnings(&self) -> u64 {
        self.sinkhorn_warnings.load(Ordering::Relaxed)
    }

    pub fn reset(&self) {
        self.calls.store(0, Ordering::Relaxed);
        self.sinkhorn_warnings.store(0, Ordering::Relaxed);
    }
}

impl Clone for GraphMetric {
    /// Clones the configuration with fresh counters.
    fn clone(&self) -> Self {
        Self::new(self.matcher.clone())
    }
}
