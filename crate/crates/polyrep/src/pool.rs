//! Bounded worker pool for sweeps and trace fans.

use polyrep_core::lyapunov::{self, LyapunovParams, SweepRow, SweepTable};
use polyrep_core::Result;
use rayon::prelude::*;

/// Environment variable holding the worker count.
pub const WORKERS_ENV: &str = "POLYREP_WORKERS";

/// Worker count from [`WORKERS_ENV`], else the number of available cores.
pub fn worker_count() -> Result<usize, String> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(format!("{WORKERS_ENV} must be a positive integer, got `{v}`")),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

pub fn build_pool(workers: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .thread_name(|i| format!("polyrep-{i}"))
        .build()
        .expect("thread pool")
}

/// Evaluates `f` on every item in the pool; results keep the input order.
pub fn ordered_map<T, R, F>(pool: &rayon::ThreadPool, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    pool.install(|| items.par_iter().map(&f).collect())
}

/// Lyapunov sweep over `n` evenly spaced values, one spectrum per job.
pub fn parallel_sweep(
    pool: &rayon::ThreadPool,
    lo: f64,
    hi: f64,
    n: usize,
    params: &LyapunovParams,
) -> Result<SweepTable> {
    let mus = lyapunov::grid(lo, hi, n)?;
    let rows = ordered_map(pool, &mus, |&mu| SweepRow { mu, result: lyapunov::spectrum_at(mu, params) });
    Ok(SweepTable::from_rows(rows))
}
