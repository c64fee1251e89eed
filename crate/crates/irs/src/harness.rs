//! Deterministic parallel map over sample indices.
//!
//! Every sample draws from its own ChaCha stream keyed by (seed, index), and
//! results are collected in index order, so output does not depend on the
//! number of threads or on scheduling.

use rayon::prelude::*;

/// Environment variable holding the default thread count.
pub const THREADS_ENV: &str = "IRS_THREADS";

/// Thread count from an explicit value, else `IRS_THREADS`, else the number
/// of available cores.
pub fn thread_count(explicit: Option<usize>) -> usize {
    explicit
        .or_else(|| std::env::var(THREADS_ENV).ok().and_then(|v| v.parse().ok()))
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// A fixed-size worker pool.
pub struct Harness {
    pool: rayon::ThreadPool,
}

impl Harness {
    pub fn new(threads: usize) -> Self {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build().expect("thread pool");
        Harness { pool }
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }

    /// `f(0), …, f(n − 1)` in index order.
    pub fn map<T, F>(&self, n: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        self.pool.install(|| (0..n).into_par_iter().map(&f).collect())
    }

    /// Like [`map`](Self::map), stopping at the first error in index order.
    pub fn try_map<T, E, F>(&self, n: u64, f: F) -> Result<Vec<T>, E>
    where
        T: Send,
        E: Send,
        F: Fn(u64) -> Result<T, E> + Sync + Send,
    {
        self.map(n, f).into_iter().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use irs_core::shift::{sample_stream, unit_float};

    #[test]
    fn results_do_not_depend_on_threads() {
        let draw = |i| unit_float(&mut sample_stream(7, i));
        let one = Harness::new(1).map(1000, draw);
        let many = Harness::new(8).map(1000, draw);
        assert_eq!(one, many);
        assert_eq!(Harness::new(3).threads(), 3);
    }

    #[test]
    fn explicit_thread_count_wins() {
        assert_eq!(thread_count(Some(5)), 5);
        assert!(thread_count(None) >= 1);
    }
}
