//! Execution policy for the data-parallel loops (coefficient-space
//! enumerations, box search, per-member reports).
//!
//! With the `parallel` feature, [`Exec::Parallel`] runs on the rayon pool;
//! without it, both variants run sequentially. Results are always returned
//! in input order, so output never depends on the policy.

use std::ops::Range;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Exec {
    Sequential,
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

impl Exec {
    /// Map over owned items, preserving order.
    pub fn map<T, R, F>(self, items: Vec<T>, f: F) -> Vec<R>
    where
        T: Send,
        R: Send,
        F: Fn(T) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => items.into_par_iter().map(f).collect(),
            _ => items.into_iter().map(f).collect(),
        }
    }

    /// Map over an integer range, preserving order.
    pub fn map_range<R, F>(self, range: Range<u64>, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(u64) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => range.into_par_iter().map(f).collect(),
            _ => range.map(f).collect(),
        }
    }

    /// Number of indices in `range` satisfying `pred`.
    pub fn count_range<F>(self, range: Range<u64>, pred: F) -> u64
    where
        F: Fn(u64) -> bool + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => range.into_par_iter().filter(|&i| pred(i)).count() as u64,
            _ => range.filter(|&i| pred(i)).count() as u64,
        }
    }

    /// Fold `range` with an associative combine; `identity` must be neutral.
    pub fn reduce_range<R, M, C>(self, range: Range<u64>, identity: R, map: M, combine: C) -> R
    where
        R: Send + Sync + Clone,
        M: Fn(u64) -> R + Sync + Send,
        C: Fn(R, R) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => range
                .into_par_iter()
                .map(map)
                .reduce(|| identity.clone(), &combine),
            _ => range.map(map).fold(identity, combine),
        }
    }
}

/// Cap the global worker count. Returns false if the pool was already
/// initialised or the crate was built without `parallel`.
pub fn set_global_jobs(jobs: usize) -> bool {
    #[cfg(feature = "parallel")]
    {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global()
            .is_ok()
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = jobs;
        false
    }
}
