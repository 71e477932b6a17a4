//! Data-parallel helpers. With the `parallel` feature (default) the indexed
//! maps fan out over rayon; results are collected in index order and reduced
//! sequentially, so outputs are identical to the sequential path regardless
//! of thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over `0..n`, results in index order.
#[cfg(feature = "parallel")]
pub fn indexed_map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn indexed_map<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    indexed_map_seq(n, f)
}

/// Sequential twin of [`indexed_map`]; always available for benchmarking the
/// parallel speedup and as the fallback when `parallel` is disabled.
pub fn indexed_map_seq<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

/// Reduce `f(0), ..., f(n-1)` with an associative, commutative `combine`.
/// Deterministic for any schedule as long as `combine` is a true lattice
/// operation (e.g. max with a total tie-break).
#[cfg(feature = "parallel")]
pub fn indexed_reduce<T, F, C>(n: usize, f: F, identity: T, combine: C) -> T
where
    T: Send + Sync + Clone,
    F: Fn(usize) -> T + Sync + Send,
    C: Fn(T, T) -> T + Sync + Send,
{
    (0..n)
        .into_par_iter()
        .map(f)
        .reduce(|| identity.clone(), &combine)
}

#[cfg(not(feature = "parallel"))]
pub fn indexed_reduce<T, F, C>(n: usize, f: F, identity: T, combine: C) -> T
where
    T: Clone,
    F: Fn(usize) -> T,
    C: Fn(T, T) -> T,
{
    indexed_reduce_seq(n, f, identity, combine)
}

/// Sequential twin of [`indexed_reduce`].
pub fn indexed_reduce_seq<T, F, C>(n: usize, f: F, identity: T, combine: C) -> T
where
    T: Clone,
    F: Fn(usize) -> T,
    C: Fn(T, T) -> T,
{
    (0..n).map(f).fold(identity, combine)
}
