use super::{aligned_sq_cost, Alignment};
use crate::error::{Error, Result};
use crate::graph::{Permutation, Representation};

pub const BRUTE_FORCE_MAX_ORDER: usize = 8;

/// Advances `p` to its lexicographic successor; false once `p` is the last permutation.
pub(crate) fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = p.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = p.iter().rposition(|&v| v > p[i]).expect("successor exists");
    p.swap(i, j);
    p[i + 1..].reverse();
    true
}

/// Enumerates all `n!` permutations of `y`. Ties go to the lexicographically
/// smallest permutation.
pub fn brute_force_distance(x: &Representation, y: &Representation) -> Result<Alignment> {
    x.check_shape(y)?;
    let n = x.order();
    if n > BRUTE_FORCE_MAX_ORDER {
        return Err(Error::OracleSize(n));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = perm.clone();
    let mut best_sq = aligned_sq_cost(x, y, &perm);
    while next_permutation(&mut perm) {
        let sq = aligned_sq_cost(x, y, &perm);
        if sq < best_sq {
            best_sq = sq;
            best.copy_from_slice(&perm);
        }
    }
    Ok(Alignment { perm: Permutation::from_vec_unchecked(best), cost: best_sq.sqrt(), exact: true })
}
