//! Data-parallel map used by the enumeration, candidate-search, and
//! Monte-Carlo drivers. With the `parallel` feature (default) the work is
//! spread over a rayon pool; without it the same loop runs sequentially.
//! Results always come back in index order, so callers are deterministic
//! either way.

#[cfg(feature = "parallel")]
pub fn map_indexed<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_indexed<U, F>(n: usize, f: F) -> Vec<U>
where
    F: Fn(usize) -> U,
{
    (0..n).map(f).collect()
}
