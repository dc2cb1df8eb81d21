//! Data-parallel map helpers.
//!
//! Independent work items (probe-grid cells, sweep cells) are evaluated with
//! [`map_indexed`]. With the `parallel` feature the evaluation runs on the
//! rayon pool; without it a plain loop is used. Results are always collected
//! in item order, so reductions over the output are order-fixed and the two
//! modes produce bit-identical results.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Evaluates `f(0..count)` and returns the results in index order.
pub fn map_indexed<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..count).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..count).map(f).collect()
    }
}

/// Fallible variant of [`map_indexed`]; returns the first error by index.
pub fn try_map_indexed<T, E, F>(count: usize, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(usize) -> Result<T, E> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        let results: Vec<Result<T, E>> = (0..count).into_par_iter().map(f).collect();
        results.into_iter().collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..count).map(f).collect()
    }
}
