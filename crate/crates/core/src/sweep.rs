//! Batches of independent solves.
//!
//! With the `parallel` feature the jobs run on the rayon pool; otherwise they
//! run in order on the calling thread. Results always come back in job order.

use crate::error::Result;
use crate::mmap::{solve_default, SolveResult, SolverConfig};
use crate::nonlinearity::NonlinearityModel;

/// Apply `f` to every item, preserving order.
pub fn map_jobs<T, R, F>(items: &[T], parallel: bool, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = parallel;
    items.iter().map(f).collect()
}

/// Whether the crate was built with rayon support.
pub const fn parallel_available() -> bool {
    cfg!(feature = "parallel")
}

/// Run `f` inside a rayon pool with `threads` workers (0 = rayon default).
/// Without the `parallel` feature this just calls `f`.
pub fn with_threads<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> R {
    #[cfg(feature = "parallel")]
    if threads > 0 {
        if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
            return pool.install(f);
        }
    }
    let _ = threads;
    f()
}

/// One cell of a parameter sweep.
#[derive(Debug, Clone)]
pub struct SweepJob {
    pub model: NonlinearityModel,
    pub config: SolverConfig,
}

/// Solve each job with the default guess, preserving order.
pub fn solve_all(jobs: &[SweepJob], parallel: bool) -> Vec<Result<SolveResult>> {
    map_jobs(jobs, parallel, |job| solve_default(&job.model, &job.config))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let xs: Vec<u64> = (0..257).collect();
        let serial = map_jobs(&xs, false, |x| x * x);
        let par = map_jobs(&xs, true, |x| x * x);
        assert_eq!(serial, par);
        assert_eq!(serial[16], 256);
    }

    #[test]
    fn thread_pool_runs_closure() {
        assert_eq!(with_threads(2, || 7), 7);
        assert_eq!(with_threads(0, || 8), 8);
    }
}
