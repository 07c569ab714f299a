//! Optional dedicated thread pools.

use crate::error::{Error, Result};

/// Run `work` on a pool of `workers` threads, or on the global pool.
pub(crate) fn install<T, F>(workers: Option<usize>, work: F) -> Result<T>
where
    T: Send,
    F: FnOnce() -> T + Send,
{
    match workers {
        Some(n) => Ok(rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::Unsupported(format!("thread pool: {e}")))?
            .install(work)),
        None => Ok(work()),
    }
}
