//! Sequential or rayon-backed evaluation over index ranges.
//!
//! Results always come back in index order, so output is identical whatever
//! the strategy or thread count. Without the `parallel` feature,
//! [`Execution::Parallel`] runs sequentially.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "NONLOC_THREADS";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }

    /// `f(0), .., f(n-1)` in order, stopping at the first error.
    pub fn try_map<T, F>(self, n: usize, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(usize) -> Result<T> + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return (0..n).into_par_iter().map(f).collect();
        }
        (0..n).map(f).collect()
    }

    /// The `Some` results of `f` over `0..n`, in order.
    pub fn try_filter_map<T, F>(self, n: usize, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(usize) -> Result<Option<T>> + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return (0..n).into_par_iter().filter_map(|i| f(i).transpose()).collect();
        }
        (0..n).filter_map(|i| f(i).transpose()).collect()
    }

    /// Folds `f(i)` into per-worker accumulators and merges them. `merge`
    /// must be associative and `A::default()` its identity.
    pub fn try_fold<T, A, F, G, M>(self, n: usize, f: F, fold: G, merge: M) -> Result<A>
    where
        A: Default + Send,
        F: Fn(usize) -> Result<T> + Sync + Send,
        G: Fn(A, T) -> A + Sync + Send,
        M: Fn(A, A) -> A + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return (0..n)
                .into_par_iter()
                .try_fold(A::default, |acc, i| f(i).map(|item| fold(acc, item)))
                .try_reduce(A::default, |a, b| Ok(merge(a, b)));
        }
        let _ = &merge;
        (0..n).try_fold(A::default(), |acc, i| f(i).map(|item| fold(acc, item)))
    }
}

/// Worker cap from `NONLOC_THREADS`, if set.
pub fn thread_cap_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(0) | Err(_) => Err(Error::InvalidParameter(format!("{THREADS_ENV} must be a positive integer, got '{v}'"))),
            Ok(n) => Ok(Some(n)),
        },
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(Error::InvalidParameter(format!("{THREADS_ENV}: {e}"))),
    }
}

/// Runs `op` on a pool of at most `threads` workers (global pool if `None`).
#[cfg(feature = "parallel")]
pub fn with_threads<R: Send>(threads: Option<usize>, op: impl FnOnce() -> R + Send) -> Result<R> {
    match threads {
        None => Ok(op()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::InvalidParameter(format!("cannot build thread pool: {e}")))?;
            Ok(pool.install(op))
        }
    }
}

#[cfg(not(feature = "parallel"))]
pub fn with_threads<R: Send>(_threads: Option<usize>, op: impl FnOnce() -> R + Send) -> Result<R> {
    Ok(op())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategies_agree() {
        for exec in [Execution::Sequential, Execution::Parallel] {
            let squares = exec.try_map(100, |i| Ok(i * i)).unwrap();
            assert_eq!(squares, (0..100).map(|i| i * i).collect::<Vec<_>>());

            let evens = exec.try_filter_map(10, |i| Ok((i % 2 == 0).then_some(i))).unwrap();
            assert_eq!(evens, vec![0, 2, 4, 6, 8]);

            let sum: usize = exec.try_fold(1000, Ok, |a: usize, x| a + x, |a, b| a + b).unwrap();
            assert_eq!(sum, 499_500);
        }
    }

    #[test]
    fn errors_propagate() {
        for exec in [Execution::Sequential, Execution::Parallel] {
            let r = exec.try_map(10, |i| {
                if i == 7 {
                    Err(Error::EmptyDataset)
                } else {
                    Ok(i)
                }
            });
            assert!(r.is_err());
        }
    }

    #[test]
    fn capped_pool_runs() {
        let v = with_threads(Some(2), || Execution::Parallel.try_map(5, Ok).unwrap()).unwrap();
        assert_eq!(v, vec![0, 1, 2, 3, 4]);
    }
}
