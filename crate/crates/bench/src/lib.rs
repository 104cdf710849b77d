//! Shared fixtures for the criterion benchmarks.

use graphquant::{generate_synthetic, random_prototypes, Permutation, Representation, Result};

/// Distorted copies of `prototypes` random prototypes, lifted to a common order.
pub fn clustered(prototypes: usize, copies: usize, order: usize, seed: u64) -> Result<(Vec<Representation>, Vec<String>)> {
    let protos = random_prototypes(prototypes, order, 2, 0.5, 3.0, seed)?;
    let ds = generate_synthetic(&protos, copies, 0.2, 0.05, seed)?;
    Ok((ds.representations()?, ds.labels()))
}

/// A random graph of the given order and a shuffled copy of it.
pub fn isomorphic_pair(order: usize, seed: u64) -> Result<(Representation, Representation)> {
    let (graphs, _) = clustered(1, 1, order, seed)?;
    let x = graphs.into_iter().next().expect("one graph");
    let reversed = Permutation::new((0..order).rev().collect())?;
    let y = x.permute(&reversed)?;
    Ok((x, y))
}
