//! Line-delimited JSON graph datasets and a distorted-prototype generator.
//!
//! One graph per line:
//!
//! ```text
//! {"id":"A_0","label":"A","r":2,"nodes":[[0.1,0.2],[1.0,1.5]],"edges":[[0,1,[1.0,0.0]]]}
//! ```

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::graph::{AttributedGraph, Edge, Representation};

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub graphs: Vec<AttributedGraph>,
    attr_dim: usize,
    max_order: usize,
}

impl Dataset {
    /// Validates every graph and the shared attribute dimension.
    pub fn from_graphs(graphs: Vec<AttributedGraph>) -> Result<Self> {
        let Some(first) = graphs.first() else {
            return Err(Error::EmptyDataset);
        };
        let attr_dim = first.r;
        for g in &graphs {
            g.validate()?;
            if g.r != attr_dim {
                return Err(Error::InvalidGraph {
                    id: g.id.clone(),
                    msg: format!("attribute dimension {} differs from the dataset's {attr_dim}", g.r),
                });
            }
        }
        let max_order = graphs.iter().map(AttributedGraph::order).max().unwrap_or(0);
        Ok(Self { graphs, attr_dim, max_order })
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    pub fn attr_dim(&self) -> usize {
        self.attr_dim
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn has_labels(&self) -> bool {
        self.graphs.iter().any(|g| !g.label.is_empty())
    }

    pub fn labels(&self) -> Vec<String> {
        self.graphs.iter().map(|g| g.label.clone()).collect()
    }

    /// All graphs lifted to the dataset's maximum order.
    pub fn representations(&self) -> Result<Vec<Representation>> {
        self.graphs.iter().map(|g| Representation::from_graph(g, self.max_order, false)).collect()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read(BufReader::new(File::open(path)?))
    }

    /// Parses one JSON record per line; blank lines are skipped.
    pub fn read<R: BufRead>(reader: R) -> Result<Self> {
        let mut graphs = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let g: AttributedGraph =
                serde_json::from_str(&line).map_err(|e| Error::Parse { line: idx + 1, msg: e.to_string() })?;
            graphs.push(g);
        }
        Self::from_graphs(graphs)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut out = BufWriter::new(File::create(path)?);
        self.write(&mut out)?;
        out.flush()?;
        Ok(())
    }

    pub fn write<W: Write>(&self, mut out: W) -> Result<()> {
        for g in &self.graphs {
            serde_json::to_writer(&mut out, g).map_err(std::io::Error::from)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

/// Per-graph RNG derived from the run seed and the graph's position.
fn graph_rng(seed: u64, prototype: usize, copy: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((prototype as u64) << 32) | copy as u64);
    rng
}

/// `copies` distorted instances of every prototype.
///
/// Attributes of vertices and present edges receive additive Gaussian noise.
/// Every vertex pair toggles its edge with probability `edge_flip_prob`; a new
/// edge starts from the prototype's mean edge attribute (all ones if the
/// prototype has no edges). Labels are the prototype ids.
pub fn generate_synthetic(
    prototypes: &[AttributedGraph],
    copies: usize,
    noise_sigma: f64,
    edge_flip_prob: f64,
    seed: u64,
) -> Result<Dataset> {
    if copies == 0 {
        return Err(Error::InvalidArgument("copies must be at least 1".into()));
    }
    if !noise_sigma.is_finite() || noise_sigma < 0.0 {
        return Err(Error::InvalidArgument(format!("noise sigma must be nonnegative, got {noise_sigma}")));
    }
    if !(0.0..=1.0).contains(&edge_flip_prob) {
        return Err(Error::InvalidArgument(format!("edge flip probability must lie in [0, 1], got {edge_flip_prob}")));
    }
    let noise = Normal::new(0.0, noise_sigma).map_err(|e| Error::InvalidArgument(e.to_string()))?;

    let mut graphs = Vec::with_capacity(prototypes.len() * copies);
    for (p, proto) in prototypes.iter().enumerate() {
        proto.validate()?;
        let r = proto.r;
        let m = proto.order();
        let mut mean_edge = vec![0.0; r];
        for Edge(_, _, attr) in &proto.edges {
            mean_edge.iter_mut().zip(attr).for_each(|(s, a)| *s += a / proto.edges.len() as f64);
        }
        if proto.edges.is_empty() {
            mean_edge.fill(1.0);
        }
        let mut present: Vec<Option<&[f64]>> = vec![None; m * m];
        for Edge(u, v, attr) in &proto.edges {
            present[u.min(v) * m + u.max(v)] = Some(attr);
        }

        for c in 0..copies {
            let mut rng = graph_rng(seed, p, c);
            let jitter = |attr: &[f64], rng: &mut ChaCha8Rng| -> Vec<f64> {
                attr.iter().map(|a| a + noise.sample(rng)).collect()
            };
            let nodes = proto.nodes.iter().map(|attr| jitter(attr, &mut rng)).collect();
            let mut edges = Vec::new();
            for u in 0..m {
                for v in u + 1..m {
                    let flip = edge_flip_prob > 0.0 && rng.random_bool(edge_flip_prob);
                    match (present[u * m + v], flip) {
                        (Some(attr), false) => edges.push(Edge(u, v, jitter(attr, &mut rng))),
                        (None, true) => edges.push(Edge(u, v, jitter(&mean_edge, &mut rng))),
                        _ => {}
                    }
                }
            }
            graphs.push(AttributedGraph {
                id: format!("{}_{c}", proto.id),
                label: proto.id.clone(),
                r,
                nodes,
                edges,
            });
        }
    }
    Dataset::from_graphs(graphs)
}

/// Random prototypes with vertex and edge attributes drawn uniformly from `[0, scale)`.
pub fn random_prototypes(
    count: usize,
    order: usize,
    attr_dim: usize,
    edge_prob: f64,
    scale: f64,
    seed: u64,
) -> Result<Vec<AttributedGraph>> {
    if order == 0 || attr_dim == 0 {
        return Err(Error::InvalidArgument("prototypes need a positive order and attribute dimension".into()));
    }
    if !(0.0..=1.0).contains(&edge_prob) || scale.is_nan() || scale <= 0.0 {
        return Err(Error::InvalidArgument(format!("invalid edge probability {edge_prob} or scale {scale}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| (0..attr_dim).map(|_| rng.random_range(0.0..scale)).collect::<Vec<_>>();
    Ok((0..count)
        .map(|p| {
            let nodes = (0..order).map(|_| draw(&mut rng)).collect();
            let mut edges = Vec::new();
            for u in 0..order {
                for v in u + 1..order {
                    if rng.random_bool(edge_prob) {
                        edges.push(Edge(u, v, draw(&mut rng)));
                    }
                }
            }
            AttributedGraph { id: format!("P{p}"), label: format!("P{p}"), r: attr_dim, nodes, edges }
        })
        .collect())
}
