//! Parallel Monte Carlo driver.
//!
//! Sample values are computed in parallel chunks (each sample is a pure
//! function of `(seed, index)`), then folded into the accumulator in
//! strict index order with the stop rule checked after every sample --
//! the same fold the serial estimators run, so the result is bitwise
//! identical for any worker count.

use iacount_core::mc::{
    log_constant_general, log_constant_square, log_sample_general, log_sample_square,
    McAccumulator, McConfig, McEstimate, TracePoint,
};
use iacount_core::sampling::{sample_stiefel_point, RngStream};
use iacount_core::{HypothesisError, Scenario};
use rayon::prelude::*;

const CHUNK: u64 = 1024;

/// Which integral the estimator averages.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EstimatorKind {
    /// Unit-sphere channel points; any tight scenario.
    General,
    /// Haar-frame points; tight square symmetric scenarios with K >= 3.
    Square,
}

/// Runs an estimator on `threads` workers (0 = one per core), invoking
/// `on_checkpoint` every `cfg.checkpoint_interval` samples.
pub fn estimate_parallel(
    sc: &Scenario,
    cfg: &McConfig,
    kind: EstimatorKind,
    threads: usize,
    mut on_checkpoint: impl FnMut(TracePoint),
) -> Result<McEstimate, HypothesisError> {
    let log_c = match kind {
        EstimatorKind::General => log_constant_general(sc)?.log_value,
        EstimatorKind::Square => {
            let c = log_constant_square(sc)?.log_value;
            sample_stiefel_point(sc, RngStream::new(cfg.seed, 0))?;
            c
        }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool");

    let mut acc = McAccumulator::new();
    let mut done = false;
    let mut chunk_start = 0u64;
    while !done && chunk_start < cfg.max_samples {
        let chunk_end = (chunk_start + CHUNK).min(cfg.max_samples);
        let values: Vec<f64> = pool.install(|| {
            (chunk_start..chunk_end)
                .into_par_iter()
                .map(|index| match kind {
                    EstimatorKind::General => log_sample_general(sc, log_c, cfg.seed, index),
                    EstimatorKind::Square => log_sample_square(sc, log_c, cfg.seed, index),
                })
                .collect()
        });
        for v in values {
            acc.push(v);
            let n = acc.n();
            if cfg.checkpoint_interval > 0 && n.is_multiple_of(cfg.checkpoint_interval) {
                on_checkpoint(TracePoint {
                    n,
                    mean: acc.mean(),
                    std_error_rel: acc.std_error_rel(),
                });
            }
            if acc.converged(cfg) {
                done = true;
                break;
            }
        }
        chunk_start = chunk_end;
    }
    Ok(acc.finalize(cfg))
}
