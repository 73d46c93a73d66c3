//! Order-preserving map over independent jobs, on a rayon pool when the
//! `parallel` feature is on and sequentially otherwise.
//!
//! `QSLICE_THREADS` caps the pool size; `QSLICE_THREADS=1` forces the
//! sequential path.

use std::env;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exec {
    Parallel,
    Sequential,
}

impl Exec {
    /// `Parallel` when the feature is compiled in and more than one thread
    /// is allowed.
    pub fn from_env() -> Exec {
        if cfg!(feature = "parallel") && threads() > 1 {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

pub fn threads() -> usize {
    env::var("QSLICE_THREADS")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&t| t > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

#[cfg(feature = "parallel")]
fn pool() -> &'static rayon::ThreadPool {
    static POOL: std::sync::OnceLock<rayon::ThreadPool> = std::sync::OnceLock::new();
    POOL.get_or_init(|| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads())
            .build()
            .expect("thread pool")
    })
}

/// `items.map(f)`, results in input order whichever path runs.
pub fn map<T, R, F>(exec: Exec, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => {
            use rayon::prelude::*;
            pool().install(|| items.par_iter().map(f).collect())
        }
        _ => items.iter().map(f).collect(),
    }
}
