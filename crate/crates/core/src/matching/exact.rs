//! Depth-first branch and bound over vertex assignments.
//!
//! Vertices of `x` are assigned to vertices of `y` one at a time. The partial
//! cost covers the vertex terms of assigned vertices and the edge terms between
//! assigned pairs; the bound adds, for every unassigned vertex of `x`, its
//! cheapest vertex term among the free vertices of `y`. Edge terms involving
//! unassigned vertices are dropped, so the bound never overestimates.

use super::{aligned_sq_cost, Alignment};
use crate::error::{Error, Result};
use crate::graph::{invert, Permutation, Representation};

const UNASSIGNED: usize = usize::MAX;

pub fn exact_distance(x: &Representation, y: &Representation) -> Result<Alignment> {
    exact_distance_with_budget(x, y, None)
}

/// As [`exact_distance`], failing with [`Error::BudgetExceeded`] once more than
/// `node_budget` search nodes have been expanded.
pub fn exact_distance_with_budget(
    x: &Representation,
    y: &Representation,
    node_budget: Option<u64>,
) -> Result<Alignment> {
    x.check_shape(y)?;
    let mut search = Search::new(x, y, node_budget);
    search.run()?;
    Ok(Alignment {
        perm: Permutation::from_vec_unchecked(search.best_perm),
        cost: search.best_sq.sqrt(),
        exact: true,
    })
}

fn sq_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum()
}

struct Search<'a> {
    x: &'a Representation,
    y: &'a Representation,
    n: usize,
    /// x vertices in expansion order.
    order: Vec<usize>,
    /// `vertex_cost[a * n + t]` = ‖x_aa − y_tt‖².
    vertex_cost: Vec<f64>,
    /// x vertex → y vertex.
    sigma: Vec<usize>,
    used: Vec<bool>,
    best_sq: f64,
    best_perm: Vec<usize>,
    nodes: u64,
    budget: Option<u64>,
}

impl<'a> Search<'a> {
    fn new(x: &'a Representation, y: &'a Representation, budget: Option<u64>) -> Self {
        let n = x.order();
        let mut vertex_cost = vec![0.0; n * n];
        for a in 0..n {
            for t in 0..n {
                vertex_cost[a * n + t] = sq_diff(x.cell(a, a), y.cell(t, t));
            }
        }

        // high-norm, high-degree vertices first tighten the incumbent early
        let key = |a: usize| {
            let norm = x.cell(a, a).iter().map(|v| v * v).sum::<f64>().sqrt();
            let degree = (0..n).filter(|&b| b != a && x.cell(a, b).iter().any(|&v| v != 0.0)).count();
            norm + degree as f64
        };
        let keys: Vec<f64> = (0..n).map(key).collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| keys[b].total_cmp(&keys[a]).then(a.cmp(&b)));

        // greedy vertex-term assignment as the initial incumbent
        let mut sigma = vec![UNASSIGNED; n];
        let mut used = vec![false; n];
        for &a in &order {
            let t = (0..n)
                .filter(|&t| !used[t])
                .min_by(|&s, &t| vertex_cost[a * n + s].total_cmp(&vertex_cost[a * n + t]))
                .expect("a free vertex remains");
            sigma[a] = t;
            used[t] = true;
        }
        let best_perm = invert(&sigma);
        let best_sq = aligned_sq_cost(x, y, &best_perm);

        Self {
            x,
            y,
            n,
            order,
            vertex_cost,
            sigma: vec![UNASSIGNED; n],
            used: vec![false; n],
            best_sq,
            best_perm,
            nodes: 0,
            budget,
        }
    }

    fn run(&mut self) -> Result<()> {
        if self.n > 0 {
            self.expand(0, 0.0)?;
        }
        Ok(())
    }

    /// Slack so that exact ties are still explored and resolved by the canonical cost.
    fn prune_threshold(&self) -> f64 {
        self.best_sq + 1e-9 * (1.0 + self.best_sq)
    }

    fn remaining_bound(&self, depth: usize) -> f64 {
        let n = self.n;
        self.order[depth..]
            .iter()
            .map(|&a| {
                (0..n)
                    .filter(|&t| !self.used[t])
                    .map(|t| self.vertex_cost[a * n + t])
                    .fold(f64::INFINITY, f64::min)
            })
            .sum()
    }

    fn increment(&self, depth: usize, a: usize, t: usize) -> f64 {
        let mut inc = self.vertex_cost[a * self.n + t];
        for &b in &self.order[..depth] {
            let s = self.sigma[b];
            inc += sq_diff(self.x.cell(a, b), self.y.cell(t, s));
            inc += sq_diff(self.x.cell(b, a), self.y.cell(s, t));
        }
        inc
    }

    fn expand(&mut self, depth: usize, partial: f64) -> Result<()> {
        if depth == self.n {
            let perm = invert(&self.sigma);
            let sq = aligned_sq_cost(self.x, self.y, &perm);
            if sq < self.best_sq || (sq == self.best_sq && perm < self.best_perm) {
                self.best_sq = sq;
                self.best_perm = perm;
            }
            return Ok(());
        }
        self.nodes += 1;
        if let Some(budget) = self.budget {
            if self.nodes > budget {
                return Err(Error::BudgetExceeded(budget));
            }
        }

        let a = self.order[depth];
        let mut candidates: Vec<(f64, usize)> = (0..self.n)
            .filter(|&t| !self.used[t])
            .map(|t| (self.increment(depth, a, t), t))
            .collect();
        candidates.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.cmp(&q.1)));

        for (inc, t) in candidates {
            let cost = partial + inc;
            if cost > self.prune_threshold() {
                // candidates are sorted by increment, so the rest are no better
                break;
            }
            self.sigma[a] = t;
            self.used[t] = true;
            let bound = cost + self.remaining_bound(depth + 1);
            if bound <= self.prune_threshold() {
                self.expand(depth + 1, cost)?;
            }
            self.sigma[a] = UNASSIGNED;
            self.used[t] = false;
        }
        Ok(())
    }
}
