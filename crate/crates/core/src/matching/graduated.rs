//! Graduated assignment: softassign with an annealed inverse temperature and
//! Sinkhorn balancing, hardened to a permutation at the end.
//!
//! Over permutations, `‖x − π(y)‖²` equals a constant minus twice the edge
//! compatibility `Σ_{a≠b} ⟨x_ab, y_σ(a)σ(b)⟩` plus the vertex term
//! `Σ_a ‖x_aa − y_σ(a)σ(a)‖²`. The soft match matrix climbs the negative
//! gradient of that objective.

use serde::{Deserialize, Serialize};

use super::{aligned_sq_cost, greedy_max_assignment, hungarian_max_assignment, Alignment};
use crate::error::{Error, Result};
use crate::graph::{invert, Permutation, Representation};

/// How the final doubly-stochastic matrix becomes a permutation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Cleanup {
    #[default]
    Greedy,
    Hungarian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaParams {
    pub beta_start: f64,
    pub beta_rate: f64,
    pub beta_max: f64,
    pub sinkhorn_iters: usize,
    pub sinkhorn_tol: f64,
    pub assign_iters_per_beta: usize,
    #[serde(default)]
    pub cleanup: Cleanup,
}

impl Default for GaParams {
    fn default() -> Self {
        Self {
            beta_start: 0.5,
            beta_rate: 1.075,
            beta_max: 10.0,
            sinkhorn_iters: 30,
            sinkhorn_tol: 1e-3,
            assign_iters_per_beta: 4,
            cleanup: Cleanup::Greedy,
        }
    }
}

impl GaParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.beta_start > 0.0
            && self.beta_rate > 1.0
            && self.beta_max > 0.0
            && self.beta_start < self.beta_max
            && self.sinkhorn_iters > 0
            && self.sinkhorn_tol > 0.0
            && self.assign_iters_per_beta > 0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("invalid graduated assignment parameters {self:?}")))
        }
    }
}

#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct GaStats {
    pub sinkhorn_nonconverged: u64,
}

pub fn graduated_assignment_distance(x: &Representation, y: &Representation, params: &GaParams) -> Result<Alignment> {
    run(x, y, params).map(|(alignment, _)| alignment)
}

pub(crate) fn run(x: &Representation, y: &Representation, params: &GaParams) -> Result<(Alignment, GaStats)> {
    x.check_shape(y)?;
    params.validate()?;
    let n = x.order();
    let mut stats = GaStats::default();
    if n == 0 {
        return Ok((Alignment { perm: Permutation::identity(0), cost: 0.0, exact: false }, stats));
    }

    let problem = Problem::new(x, y);
    let mut m = vec![1.0 / n as f64; n * n];
    let mut q = vec![0.0; n * n];
    let mut beta = params.beta_start;
    while beta <= params.beta_max {
        for _ in 0..params.assign_iters_per_beta {
            problem.ascent_direction(&m, &mut q);
            let mut next = softmax_rows(&q, n, beta);
            if !sinkhorn(&mut next, n, params.sinkhorn_iters, params.sinkhorn_tol) {
                stats.sinkhorn_nonconverged += 1;
            }
            let change: f64 = next.iter().zip(&m).map(|(a, b)| (a - b).abs()).sum();
            m = next;
            if change < params.sinkhorn_tol {
                break;
            }
        }
        beta *= params.beta_rate;
    }

    let sigma = match params.cleanup {
        Cleanup::Greedy => greedy_max_assignment(&m, n),
        Cleanup::Hungarian => hungarian_max_assignment(&m, n),
    };
    let perm = invert(&sigma);
    let cost = aligned_sq_cost(x, y, &perm).sqrt();
    Ok((Alignment { perm: Permutation::from_vec_unchecked(perm), cost, exact: false }, stats))
}

struct Problem {
    n: usize,
    r: usize,
    /// Off-diagonal attributes, channel-major: `xo[c][a * n + b]`.
    xo: Vec<Vec<f64>>,
    yo: Vec<Vec<f64>>,
    /// `vertex[a * n + i]` = ‖x_aa − y_ii‖².
    vertex: Vec<f64>,
    scale: f64,
}

impl Problem {
    fn new(x: &Representation, y: &Representation) -> Self {
        let n = x.order();
        let r = x.attr_dim();
        let split = |rep: &Representation| {
            (0..r)
                .map(|c| {
                    let mut mat = vec![0.0; n * n];
                    for a in 0..n {
                        for b in (0..n).filter(|&b| b != a) {
                            mat[a * n + b] = rep.cell(a, b)[c];
                        }
                    }
                    mat
                })
                .collect::<Vec<_>>()
        };
        let mut vertex = vec![0.0; n * n];
        for a in 0..n {
            for i in 0..n {
                vertex[a * n + i] = x.cell(a, a).iter().zip(y.cell(i, i)).map(|(u, v)| (u - v) * (u - v)).sum();
            }
        }
        let max_cell = |rep: &Representation| {
            (0..n)
                .flat_map(|a| (0..n).map(move |b| (a, b)))
                .map(|(a, b)| rep.cell(a, b).iter().map(|v| v * v).sum::<f64>())
                .fold(0.0, f64::max)
        };
        let scale = max_cell(x).max(max_cell(y)).max(1e-12);
        Self { n, r, xo: split(x), yo: split(y), vertex, scale }
    }

    /// `q ← −∇F(m) / scale` for the soft objective
    /// `F(M) = −2 Σ M_ai M_bj ⟨x_ab, y_ij⟩ + Σ M_ai ‖x_aa − y_ii‖²`.
    fn ascent_direction(&self, m: &[f64], q: &mut [f64]) {
        let n = self.n;
        q.fill(0.0);
        let mut tmp = vec![0.0; n * n];
        for c in 0..self.r {
            let xo = &self.xo[c];
            let yo = &self.yo[c];
            // (Xo M Yoᵀ)[a, i]
            tmp.fill(0.0);
            for a in 0..n {
                for b in 0..n {
                    let xab = xo[a * n + b];
                    if xab != 0.0 {
                        for j in 0..n {
                            tmp[a * n + j] += xab * m[b * n + j];
                        }
                    }
                }
            }
            for a in 0..n {
                for i in 0..n {
                    q[a * n + i] += (0..n).map(|j| tmp[a * n + j] * yo[i * n + j]).sum::<f64>();
                }
            }
            // (Xoᵀ M Yo)[a, i]
            tmp.fill(0.0);
            for b in 0..n {
                for a in 0..n {
                    let xba = xo[b * n + a];
                    if xba != 0.0 {
                        for j in 0..n {
                            tmp[a * n + j] += xba * m[b * n + j];
                        }
                    }
                }
            }
            for a in 0..n {
                for i in 0..n {
                    q[a * n + i] += (0..n).map(|j| tmp[a * n + j] * yo[j * n + i]).sum::<f64>();
                }
            }
        }
        for (qv, v) in q.iter_mut().zip(&self.vertex) {
            *qv = (2.0 * *qv - v) / self.scale;
        }
    }
}

fn softmax_rows(q: &[f64], n: usize, beta: f64) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for a in 0..n {
        let row = &q[a * n..(a + 1) * n];
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for i in 0..n {
            out[a * n + i] = (beta * (row[i] - max)).exp();
        }
    }
    out
}

/// Alternating row/column normalization. Returns whether row sums reached
/// `1 ± tol` within `iters` sweeps.
fn sinkhorn(m: &mut [f64], n: usize, iters: usize, tol: f64) -> bool {
    for _ in 0..iters {
        for a in 0..n {
            let s: f64 = m[a * n..(a + 1) * n].iter().sum();
            if s > 0.0 {
                m[a * n..(a + 1) * n].iter_mut().for_each(|v| *v /= s);
            }
        }
        for i in 0..n {
            let s: f64 = (0..n).map(|a| m[a * n + i]).sum();
            if s > 0.0 {
                (0..n).for_each(|a| m[a * n + i] /= s);
            }
        }
        let worst = (0..n)
            .map(|a| (m[a * n..(a + 1) * n].iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max);
        if worst < tol {
            return true;
        }
    }
    false
}
