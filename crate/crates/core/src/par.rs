//! Data-parallel fan-out with a sequential fallback.
//!
//! With the `parallel` feature (on by default) [`Execution::Parallel`] maps
//! over a rayon pool; without it every call runs on the current thread.
//! Results always come back in input order, so output never depends on the
//! worker count.

/// Environment variable holding the worker count for [`with_workers`].
pub const WORKERS_ENV: &str = "LRN_WORKERS";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    #[default]
    Parallel,
    Sequential,
}

impl Execution {
    /// Whether this mode actually fans out in the current build.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Order-preserving map over a slice.
pub fn map<T, R, F>(items: &[T], exec: Execution, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec == Execution::Parallel {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

/// Runs `f` on a pool sized by `LRN_WORKERS` when set, otherwise on the
/// global pool.
pub fn with_workers<R: Send>(f: impl FnOnce() -> R + Send) -> Result<R, String> {
    let workers = match std::env::var(WORKERS_ENV) {
        Ok(v) => Some(v.trim().parse::<usize>().map_err(|_| format!("{WORKERS_ENV}={v} is not a count"))?),
        Err(_) => None,
    };
    #[cfg(feature = "parallel")]
    if let Some(n) = workers {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build().map_err(|e| e.to_string())?;
        return Ok(pool.install(f));
    }
    let _ = workers;
    Ok(f())
}
