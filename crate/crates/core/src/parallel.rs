//! Thread-count control for the parallel sweeps and searches.

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "PULSE_THREADS";

/// Runs `f` on a pool limited by `PULSE_THREADS` when it is set to a positive
/// integer, and on the global pool otherwise.
pub fn with_thread_cap<R: Send>(f: impl FnOnce() -> R + Send) -> R {
    let cap = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()).filter(|&n| n > 0);
    match cap.and_then(|n| rayon::ThreadPoolBuilder::new().num_threads(n).build().ok()) {
        Some(pool) => pool.install(f),
        None => f(),
    }
}
