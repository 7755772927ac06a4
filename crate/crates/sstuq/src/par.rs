//! Data-parallel map helper with a sequential fallback.
//!
//! Every parallel site in the crate maps independent indices to owned
//! outputs and collects them in index order, so results are bit-identical
//! whether the `parallel` feature is on or off and whatever the thread
//! count is. Summation order inside each output cell is always fixed.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `0..n` to a vector, in parallel when the `parallel` feature is enabled.
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Like [`map_indexed`] but for fallible per-index work; the first error
/// (by index order in the sequential build, any in the parallel one) is returned.
pub fn try_map_indexed<T, E, F>(n: usize, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(usize) -> Result<T, E> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}
