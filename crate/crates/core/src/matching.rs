//! Bipartite b-matching by augmenting paths.
//!
//! Used for multiset membership (labels against groups), partial containment
//! and slot relaxations. Instances are tiny (a handful of nodes on each
//! side), so unit augmentations are fine.

use alloc::vec;
use alloc::vec::Vec;

/// Tries to route all of `left`'s capacity into `right` along the edges given
/// by `adj`. Returns the flow matrix `flow[i][j]` when every left unit is
/// placed.
pub(crate) fn saturate_left(
    left: &[usize],
    right: &[usize],
    adj: impl Fn(usize, usize) -> bool,
) -> Option<Vec<Vec<usize>>> {
    let total_left: usize = left.iter().sum();
    let total_right: usize = right.iter().sum();
    if total_left > total_right {
        return None;
    }
    let (n, m) = (left.len(), right.len());
    let edges: Vec<Vec<bool>> = (0..n)
        .map(|i| (0..m).map(|j| adj(i, j)).collect())
        .collect();
    let mut flow = vec![vec![0usize; m]; n];
    let mut right_used = vec![0usize; m];
    for i in 0..n {
        for _ in 0..left[i] {
            let mut seen = vec![false; m];
            if !augment(i, &edges, right, &mut flow, &mut right_used, &mut seen) {
                return None;
            }
        }
    }
    Some(flow)
}

fn augment(
    i: usize,
    edges: &[Vec<bool>],
    right: &[usize],
    flow: &mut [Vec<usize>],
    right_used: &mut [usize],
    seen: &mut [bool],
) -> bool {
    for j in 0..right.len() {
        if !edges[i][j] || seen[j] {
            continue;
        }
        seen[j] = true;
        if right_used[j] < right[j] {
            right_used[j] += 1;
            flow[i][j] += 1;
            return true;
        }
        // Right node is full: try to move some other unit off it.
        for k in 0..flow.len() {
            if k != i && flow[k][j] > 0 {
                flow[k][j] -= 1;
                if augment(k, edges, right, flow, right_used, seen) {
                    flow[i][j] += 1;
                    return true;
                }
                flow[k][j] += 1;
            }
        }
    }
    false
}

/// Exact cover: both sides have equal totals and the left side saturates.
pub(crate) fn exact_cover(
    left: &[usize],
    right: &[usize],
    adj: impl Fn(usize, usize) -> bool,
) -> Option<Vec<Vec<usize>>> {
    if left.iter().sum::<usize>() != right.iter().sum::<usize>() {
        return None;
    }
    saturate_left(left, right, adj)
}
