//! Attributed graphs, their dense lifts, and the permutation action on lifts.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An undirected edge `(u, v)` with its attribute vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge(pub usize, pub usize, pub Vec<f64>);

/// A graph as it is ingested: vertex attributes plus a sparse edge list.
///
/// Non-edges implicitly carry the zero attribute.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributedGraph {
    pub id: String,
    #[serde(default)]
    pub label: String,
    pub r: usize,
    pub nodes: Vec<Vec<f64>>,
    #[serde(default)]
    pub edges: Vec<Edge>,
}

impl AttributedGraph {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn attr_dim(&self) -> usize {
        self.r
    }

    /// Checks the structural invariants: nonempty vertex set, uniform attribute
    /// length, endpoints in range, no self loops and no duplicate edges.
    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: String| Error::InvalidGraph { id: self.id.clone(), msg };
        if self.r == 0 {
            return Err(invalid("attribute dimension must be positive".into()));
        }
        if self.nodes.is_empty() {
            return Err(invalid("graph has no vertices".into()));
        }
        for (i, attr) in self.nodes.iter().enumerate() {
            if attr.len() != self.r {
                return Err(invalid(format!(
                    "vertex {i} has {} attributes, expected {}",
                    attr.len(),
                    self.r
                )));
            }
            if attr.iter().any(|v| !v.is_finite()) {
                return Err(invalid(format!("vertex {i} has a non-finite attribute")));
            }
        }
        let m = self.order();
        let mut seen = std::collections::HashSet::new();
        for Edge(u, v, attr) in &self.edges {
            if *u >= m || *v >= m {
                return Err(invalid(format!("edge ({u}, {v}) has an endpoint outside [0, {m})")));
            }
            if u == v {
                return Err(invalid(format!("self loop at vertex {u}")));
            }
            if attr.len() != self.r {
                return Err(invalid(format!(
                    "edge ({u}, {v}) has {} attributes, expected {}",
                    attr.len(),
                    self.r
                )));
            }
            if attr.iter().any(|v| !v.is_finite()) {
                return Err(invalid(format!("edge ({u}, {v}) has a non-finite attribute")));
            }
            if !seen.insert((*u.min(v), *u.max(v))) {
                return Err(invalid(format!("duplicate edge ({u}, {v})")));
            }
        }
        Ok(())
    }
}

/// A bijection on `{0, …, n-1}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(map: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; map.len()];
        for &i in &map {
            if i >= map.len() || std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidArgument(format!("{map:?} is not a permutation")));
            }
        }
        Ok(Self(map))
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn inverse(&self) -> Self {
        Self(invert(&self.0))
    }

    pub(crate) fn from_vec_unchecked(map: Vec<usize>) -> Self {
        debug_assert!(Permutation::new(map.clone()).is_ok());
        Self(map)
    }
}

pub(crate) fn invert(map: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; map.len()];
    for (i, &j) in map.iter().enumerate() {
        inv[j] = i;
    }
    inv
}

/// Dense lift of a graph: an `n × n` matrix of `r`-dimensional attributes.
///
/// Cell `(i, i)` holds the attribute of vertex `i`, cell `(i, j)` the attribute
/// of edge `{i, j}` (zero for non-edges). Storage is row-major with the
/// attribute channel innermost, so [`Representation::as_slice`] is the
/// flattened vector representation of length `n²·r`.
#[derive(Debug, Clone, PartialEq)]
pub struct Representation {
    order: usize,
    attr_dim: usize,
    data: Vec<f64>,
}

impl Representation {
    pub fn zeros(order: usize, attr_dim: usize) -> Self {
        Self { order, attr_dim, data: vec![0.0; order * order * attr_dim] }
    }

    pub fn from_vec(order: usize, attr_dim: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != order * order * attr_dim {
            return Err(Error::Dimension(format!(
                "{} values cannot form a {order}x{order}x{attr_dim} representation",
                data.len()
            )));
        }
        Ok(Self { order, attr_dim, data })
    }

    /// Lifts `g` to order `n`, padding with isolated zero vertices.
    ///
    /// In directed mode an edge `(u, v)` only fills cell `(u, v)`.
    pub fn from_graph(g: &AttributedGraph, n: usize, directed: bool) -> Result<Self> {
        if n < g.order() {
            return Err(Error::OrderOverflow { order: g.order(), target: n });
        }
        let r = g.r;
        let mut rep = Self::zeros(n, r);
        for (i, attr) in g.nodes.iter().enumerate() {
            if attr.len() != r {
                return Err(Error::Dimension(format!("vertex {i} of `{}` has {} attributes", g.id, attr.len())));
            }
            rep.cell_mut(i, i).copy_from_slice(attr);
        }
        for Edge(u, v, attr) in &g.edges {
            if *u >= g.order() || *v >= g.order() || attr.len() != r {
                return Err(Error::InvalidGraph { id: g.id.clone(), msg: format!("malformed edge ({u}, {v})") });
            }
            rep.cell_mut(*u, *v).copy_from_slice(attr);
            if !directed {
                rep.cell_mut(*v, *u).copy_from_slice(attr);
            }
        }
        Ok(rep)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn attr_dim(&self) -> usize {
        self.attr_dim
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    fn offset(&self, i: usize, j: usize) -> usize {
        (i * self.order + j) * self.attr_dim
    }

    #[inline]
    pub fn cell(&self, i: usize, j: usize) -> &[f64] {
        let o = self.offset(i, j);
        &self.data[o..o + self.attr_dim]
    }

    #[inline]
    pub fn cell_mut(&mut self, i: usize, j: usize) -> &mut [f64] {
        let o = self.offset(i, j);
        &mut self.data[o..o + self.attr_dim]
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.order == other.order && self.attr_dim == other.attr_dim
    }

    pub(crate) fn check_shape(&self, other: &Self) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::Dimension(format!(
                "{}x{}x{} vs {}x{}x{}",
                self.order, self.order, self.attr_dim, other.order, other.order, other.attr_dim
            )))
        }
    }

    /// Simultaneous row/column permutation: output cell `(p(i), p(j))` is input cell `(i, j)`.
    pub fn permute(&self, p: &Permutation) -> Result<Self> {
        if p.len() != self.order {
            return Err(Error::Dimension(format!(
                "permutation of length {} applied to order {}",
                p.len(),
                self.order
            )));
        }
        let mut out = Self::zeros(self.order, self.attr_dim);
        for i in 0..self.order {
            for j in 0..self.order {
                out.cell_mut(p.apply(i), p.apply(j)).copy_from_slice(self.cell(i, j));
            }
        }
        Ok(out)
    }

    /// Euclidean norm of `self - other` over all `n²·r` entries.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        self.check_shape(other)?;
        Ok(self.sq_distance_unchecked(other).sqrt())
    }

    pub(crate) fn sq_distance_unchecked(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b) * (a - b)).sum()
    }

    /// `self ← self + eta·(target − self)`. Returns the length of the step taken.
    pub fn move_toward(&mut self, target: &Self, eta: f64) -> Result<f64> {
        self.check_shape(target)?;
        let mut step_sq = 0.0;
        for (y, x) in self.data.iter_mut().zip(&target.data) {
            let step = eta * (x - *y);
            *y += step;
            step_sq += step * step;
        }
        Ok(step_sq.sqrt())
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.order).all(|i| (i + 1..self.order).all(|j| self.cell(i, j) == self.cell(j, i)))
    }
}

/// Lifts `g` to order `n` as an undirected graph.
pub fn pad_to_order(g: &AttributedGraph, n: usize) -> Result<Representation> {
    Representation::from_graph(g, n, false)
}

pub fn representation_distance(x: &Representation, y: &Representation) -> Result<f64> {
    x.distance(y)
}
