//! Execution of independent work items, in parallel through rayon when the
//! `parallel` feature is enabled and `parallel == true`, sequentially
//! otherwise. Results always come back in input order, so callers are
//! deterministic regardless of scheduling.

/// Applies `f` to `0..count`, collecting results in index order.
pub fn run_indexed<R, F>(count: usize, parallel: bool, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    if parallel {
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            return (0..count).into_par_iter().map(f).collect();
        }
    }
    (0..count).map(f).collect()
}

/// Number of worker threads the parallel build will use.
pub fn effective_workers() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}
