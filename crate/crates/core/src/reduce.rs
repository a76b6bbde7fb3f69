//! Fixed-shape pairwise reduction over an index range.
//!
//! The range `[lo, hi)` is always split at `lo + (hi - lo) / 2`, so the order
//! of floating-point additions depends only on the range length and never on
//! how rayon schedules the halves. Results are bit-identical for any thread
//! count, including a serial run.

use rayon::join;

/// Reduces `leaf(0) ⊕ leaf(1) ⊕ … ⊕ leaf(n-1)` with a balanced binary tree.
///
/// Returns `None` for `n == 0`. Errors short-circuit the subtree they occur in;
/// the first error in index order is returned.
pub fn tree_reduce<T, E, L, C>(n: usize, leaf: &L, combine: &C) -> Option<Result<T, E>>
where
    T: Send,
    E: Send,
    L: Fn(usize) -> Result<T, E> + Sync,
    C: Fn(T, T) -> T + Sync,
{
    (n > 0).then(|| reduce_range(0, n, leaf, combine))
}

fn reduce_range<T, E, L, C>(lo: usize, hi: usize, leaf: &L, combine: &C) -> Result<T, E>
where
    T: Send,
    E: Send,
    L: Fn(usize) -> Result<T, E> + Sync,
    C: Fn(T, T) -> T + Sync,
{
    if hi - lo == 1 {
        return leaf(lo);
    }
    let mid = lo + (hi - lo) / 2;
    let (left, right) = join(|| reduce_range(lo, mid, leaf, combine), || reduce_range(mid, hi, leaf, combine));
    Ok(combine(left?, right?))
}
