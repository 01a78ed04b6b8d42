//! Shared worker pool. `FRAC_YAMABE_THREADS` caps its size.

use std::sync::OnceLock;

use rayon::{ThreadPool, ThreadPoolBuilder};

pub const THREADS_ENV: &str = "FRAC_YAMABE_THREADS";

/// Thread count requested through the environment, if any.
pub fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&t| t > 0)
}

/// The crate-wide pool, created on first use.
pub fn pool() -> &'static ThreadPool {
    static POOL: OnceLock<ThreadPool> = OnceLock::new();
    POOL.get_or_init(|| {
        let mut b = ThreadPoolBuilder::new().thread_name(|i| format!("frac-yamabe-{i}"));
        if let Some(t) = thread_cap() {
            b = b.num_threads(t);
        }
        b.build().expect("failed to start worker pool")
    })
}

/// `f` applied to every element, in parallel, results in input order.
pub fn par_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    pool().install(|| items.par_iter().map(f).collect())
}
