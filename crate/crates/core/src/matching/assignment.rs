//! Hardening a square score matrix into a permutation (row → column).

/// Repeatedly takes the largest remaining entry and removes its row and column.
/// Ties go to the smallest `(row, col)` in row-major order.
pub(crate) fn greedy_max_assignment(scores: &[f64], n: usize) -> Vec<usize> {
    let mut row_of = vec![usize::MAX; n];
    let mut row_done = vec![false; n];
    let mut col_done = vec![false; n];
    for _ in 0..n {
        let mut best: Option<(usize, usize)> = None;
        for i in (0..n).filter(|&i| !row_done[i]) {
            for j in (0..n).filter(|&j| !col_done[j]) {
                if best.is_none_or(|(bi, bj)| scores[i * n + j] > scores[bi * n + bj]) {
                    best = Some((i, j));
                }
            }
        }
        let (i, j) = best.expect("free row and column remain");
        row_of[i] = j;
        row_done[i] = true;
        col_done[j] = true;
    }
    row_of
}

/// Maximum-weight perfect matching via the O(n³) potential-based Hungarian method.
pub(crate) fn hungarian_max_assignment(scores: &[f64], n: usize) -> Vec<usize> {
    if n == 0 {
        return Vec::new();
    }
    // minimize negated scores; 1-based indices with 0 as the virtual column
    let cost = |i: usize, j: usize| -scores[(i - 1) * n + (j - 1)];
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut matched_row = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        matched_row[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = matched_row[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost(i0, j) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[matched_row[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if matched_row[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            matched_row[j0] = matched_row[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut row_of = vec![0; n];
    for j in 1..=n {
        row_of[matched_row[j] - 1] = j - 1;
    }
    row_of
}
