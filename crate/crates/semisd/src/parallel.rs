//! Parallel drivers. Every path or replicate draws from its own stream, so
//! the output does not depend on the number of threads.

use rayon::prelude::*;

use semisd_core::autoregressive::{self, Ar1Config, SeriesSample};
use semisd_core::subordination::{PathSampler, SubordinatedSample, SubordinationSpec};
use semisd_core::Result;

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "SEMISD_THREADS";

/// Worker count from `SEMISD_THREADS`, else the machine's parallelism.
pub fn thread_count() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn pool(threads: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .expect("thread pool")
}

/// Same result as the sequential `simulate_subordinated_paths`.
pub fn simulate_paths(spec: &SubordinationSpec, threads: usize) -> Result<SubordinatedSample> {
    let sampler = PathSampler::for_spec(spec)?;
    let paths = pool(threads).install(|| {
        (0..spec.mc_paths as u64)
            .into_par_iter()
            .map(|id| sampler.path(spec, id))
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(SubordinatedSample {
        seed: spec.seed,
        time_grid: spec.time_grid.clone(),
        paths,
    })
}

/// Independent replicate chains `0..count`.
pub fn simulate_replicates(cfg: &Ar1Config, count: u64, threads: usize) -> Result<Vec<SeriesSample>> {
    pool(threads).install(|| {
        (0..count)
            .into_par_iter()
            .map(|r| autoregressive::simulate(cfg, r))
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use semisd_core::subordination::simulate_subordinated_paths;
    use semisd_core::{corpus, SemiStableExponent};

    #[test]
    fn thread_count_does_not_change_paths() {
        let spec = SubordinationSpec::new(
            SemiStableExponent::stable(2.0, 0.5, 0.5).unwrap(),
            corpus::gamma_lt(1.0, 1.0),
            vec![0.5, 1.0],
            257,
            99,
        )
        .unwrap();
        let seq = simulate_subordinated_paths(&spec).unwrap();
        assert_eq!(simulate_paths(&spec, 1).unwrap(), seq);
        assert_eq!(simulate_paths(&spec, 4).unwrap(), seq);
    }
}
