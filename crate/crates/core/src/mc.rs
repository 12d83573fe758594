//! Monte Carlo solution counting for tightly feasible networks.
//!
//! For a tight (`s = 0`) scenario the number of alignment solutions equals
//! a known constant times the average of `|det Psi|^2` over random
//! structured channel points: unit-Frobenius-sphere channels in the
//! general case, Haar orthonormal frames in the square symmetric case
//! (which converges much faster). Both constants are pure products of
//! gamma factors at integer arguments and are evaluated in the log domain,
//! as are the per-sample determinants, whose magnitudes can span hundreds
//! of orders.
//!
//! The estimator is a crude sample mean with a CLT-based stopping rule:
//! stop when the relative standard error `Sigma_n / (sqrt(n) E_n)` drops
//! below the target `epsilon`, after which the relative error is at most
//! `2 epsilon` with 95% confidence. The sample-std variant
//! `Sigma_n / E_n < epsilon` is available behind [`StopRule::SampleStd`];
//! it demands a distribution whose spread is below `epsilon` of its mean,
//! which generic determinant statistics never reach, so it effectively
//! never triggers.

use crate::linalg::log_abs_det_sq;
use crate::psi::assemble_psi;
use crate::sampling::{sample_sphere_point, sample_stiefel_point, RngStream};
use crate::scenario::Scenario;
use crate::HypothesisError;

/// Natural log of a positive scaling constant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogConstant {
    pub log_value: f64,
}

/// `ln Gamma(n)` for integer `n >= 1`, i.e. `ln (n-1)!`.
fn ln_gamma_int(n: usize) -> f64 {
    let mut acc = 0.0;
    for j in 2..n {
        acc += libm::log(j as f64);
    }
    acc
}

/// `sum_{j=from}^{to} ln Gamma(j)`; empty (zero) when `to < from`.
fn ln_gamma_sum(from: usize, to: usize) -> f64 {
    let mut acc = 0.0;
    let mut j = from;
    while j <= to {
        acc += ln_gamma_int(j);
        j += 1;
    }
    acc
}

/// Log volume of the unit sphere in `C^a`.
pub fn log_vol_sphere(a: usize) -> f64 {
    libm::log(2.0) + a as f64 * libm::log(core::f64::consts::PI) - ln_gamma_int(a)
}

/// Log volume of the unitary group of dimension `a`, in the metric
/// inherited from the Frobenius inner product.
pub fn log_vol_unitary(a: usize) -> f64 {
    let two_pi = 2.0 * core::f64::consts::PI;
    (a * (a + 1)) as f64 / 2.0 * libm::log(two_pi) - ln_gamma_sum(1, a)
}

/// Log volume of the Grassmannian of `a`-dimensional subspaces of `C^b`.
pub fn log_vol_grassmannian(a: usize, b: usize) -> f64 {
    debug_assert!(a >= 1 && a <= b);
    (a * (b - a)) as f64 * libm::log(core::f64::consts::PI) + ln_gamma_sum(2, a)
        + ln_gamma_sum(2, b - a)
        - ln_gamma_sum(2, b)
}

/// Scaling constant of the general (unit-sphere) count formula.
///
/// Per link a ratio `Gamma(N_k M_l) / Gamma(N_k M_l - d_k d_l)`, then per
/// user on each side the gamma part of a Grassmannian volume. The pi
/// powers of the sphere and Grassmannian volumes cancel exactly when
/// `s = 0`, which is why none appear here; the volume-formula route is
/// kept as a test oracle.
pub fn log_constant_general(sc: &Scenario) -> Result<LogConstant, HypothesisError> {
    let dims = sc.dims();
    if dims.s != 0 {
        return Err(HypothesisError::NotTight { s: dims.s });
    }
    let mut log_c = 0.0;
    for &(k, l) in sc.links() {
        let prod = sc.user(k).rx * sc.user(l).tx;
        let eqs = sc.user(k).streams * sc.user(l).streams;
        log_c += ln_gamma_int(prod) - ln_gamma_int(prod - eqs);
    }
    for u in sc.users() {
        log_c += ln_gamma_sum(2, u.streams) + ln_gamma_sum(2, u.rx - u.streams)
            - ln_gamma_sum(2, u.rx);
        log_c += ln_gamma_sum(2, u.streams) + ln_gamma_sum(2, u.tx - u.streams)
            - ln_gamma_sum(2, u.tx);
    }
    Ok(LogConstant { log_value: log_c })
}

/// Scaling constant of the square symmetric (orthonormal-frame) count
/// formula; exactly 1 when `N = 2d`.
pub fn log_constant_square(sc: &Scenario) -> Result<LogConstant, HypothesisError> {
    let dims = sc.dims();
    if !dims.is_square_symmetric {
        return Err(HypothesisError::NotSquareSymmetric);
    }
    if sc.num_users() < 3 {
        return Err(HypothesisError::TooFewUsers {
            required: 3,
            got: sc.num_users(),
        });
    }
    if dims.s != 0 {
        return Err(HypothesisError::NotTight { s: dims.s });
    }
    let n = sc.user(0).rx;
    let d = sc.user(0).streams;
    let k = sc.num_users();
    let links = (k * (k - 1)) as f64;
    let frame_part = ln_gamma_sum(n - d + 1, n) - ln_gamma_sum(n - 2 * d + 1, n - d);
    let grassmann_part = ln_gamma_sum(2, d) - ln_gamma_sum(n - d + 1, n);
    Ok(LogConstant {
        log_value: links * frame_part + 2.0 * k as f64 * grassmann_part,
    })
}

/// When to declare the running estimate converged.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopRule {
    /// `Sigma_n / (sqrt(n) E_n) < epsilon` (default; carries the 95%/2eps
    /// guarantee and actually terminates).
    StandardError,
    /// `Sigma_n / E_n < epsilon` (the literal sample-std ratio).
    SampleStd,
}

/// Estimator configuration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McConfig {
    /// Relative error target.
    pub epsilon: f64,
    pub seed: u64,
    pub max_samples: u64,
    /// No stop decision before this many samples; guards against spurious
    /// early convergence on near-identical initial draws.
    pub min_samples: u64,
    pub stop_rule: StopRule,
    /// Samples between progress checkpoints.
    pub checkpoint_interval: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            epsilon: 0.05,
            seed: 0,
            max_samples: 10_000_000,
            min_samples: 100,
            stop_rule: StopRule::StandardError,
            checkpoint_interval: 10_000,
        }
    }
}

/// Max-shifted accumulator state: `sum = sum_j exp(log f_j - max_log)` and
/// `sum_sq` likewise for the squares.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogAccumState {
    pub max_log: f64,
    pub sum: f64,
    pub sum_sq: f64,
}

/// Running Monte Carlo mean/deviation over log-domain sample values.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McAccumulator {
    n: u64,
    state: LogAccumState,
}

impl McAccumulator {
    pub fn new() -> Self {
        McAccumulator {
            n: 0,
            state: LogAccumState {
                max_log: f64::NEG_INFINITY,
                sum: 0.0,
                sum_sq: 0.0,
            },
        }
    }

    /// Folds in one sample given as `log f`; `-inf` encodes `f = 0`.
    pub fn push(&mut self, log_value: f64) {
        debug_assert!(!log_value.is_nan());
        self.n += 1;
        if log_value == f64::NEG_INFINITY {
            return;
        }
        let s = &mut self.state;
        if log_value > s.max_log {
            // Rescale the existing sums to the new shift.
            let scale = libm::exp(s.max_log - log_value);
            s.sum = s.sum * scale + 1.0;
            s.sum_sq = s.sum_sq * (scale * scale) + 1.0;
            s.max_log = log_value;
        } else {
            let e = libm::exp(log_value - s.max_log);
            s.sum += e;
            s.sum_sq += e * e;
        }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn state(&self) -> LogAccumState {
        self.state
    }

    /// `ln E_n`; `-inf` when every sample was zero.
    pub fn log_mean(&self) -> f64 {
        if self.state.sum == 0.0 {
            f64::NEG_INFINITY
        } else {
            self.state.max_log + libm::log(self.state.sum) - libm::log(self.n as f64)
        }
    }

    pub fn mean(&self) -> f64 {
        libm::exp(self.log_mean())
    }

    /// Shifted sample variance `(sum_sq - sum^2/n) / (n-1)`, clamped at 0.
    fn shifted_variance(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let s = &self.state;
        let v = (s.sum_sq - s.sum * s.sum / self.n as f64) / (self.n - 1) as f64;
        v.max(0.0)
    }

    /// Sample standard deviation `Sigma_n`.
    pub fn sample_std(&self) -> f64 {
        if self.state.sum == 0.0 {
            return 0.0;
        }
        libm::exp(self.state.max_log) * libm::sqrt(self.shifted_variance())
    }

    /// `Sigma_n / E_n`, computed shift-free so huge magnitudes cancel.
    pub fn sample_std_rel(&self) -> f64 {
        if self.n < 2 {
            return f64::INFINITY;
        }
        if self.state.sum == 0.0 {
            return f64::INFINITY;
        }
        self.n as f64 * libm::sqrt(self.shifted_variance()) / self.state.sum
    }

    /// Relative standard error of the mean, `Sigma_n / (sqrt(n) E_n)`.
    pub fn std_error_rel(&self) -> f64 {
        self.sample_std_rel() / libm::sqrt(self.n as f64)
    }

    /// Stop decision under the configured rule.
    pub fn converged(&self, cfg: &McConfig) -> bool {
        if self.n < cfg.min_samples.max(2) {
            return false;
        }
        let rel = match cfg.stop_rule {
            StopRule::StandardError => self.std_error_rel(),
            StopRule::SampleStd => self.sample_std_rel(),
        };
        rel < cfg.epsilon
    }

    pub fn finalize(&self, cfg: &McConfig) -> McEstimate {
        let mean = self.mean();
        let std_error_rel = self.std_error_rel();
        McEstimate {
            n: self.n,
            mean,
            log_mean: self.log_mean(),
            sample_std: self.sample_std(),
            std_error_rel,
            epsilon: cfg.epsilon,
            converged: self.converged(cfg),
            state: self.state,
            nearest_integer: nearest_unique_integer(mean, std_error_rel),
        }
    }
}

impl Default for McAccumulator {
    fn default() -> Self {
        Self::new()
    }
}

/// Rounded count, reported only when the estimate is tight enough that
/// the two-sigma interval pins a unique integer. Counts are integers; the
/// estimator is not.
fn nearest_unique_integer(mean: f64, std_error_rel: f64) -> Option<u128> {
    if !(mean.is_finite() && std_error_rel < 0.05) {
        return None;
    }
    let lo = mean * (1.0 - 2.0 * std_error_rel);
    let hi = mean * (1.0 + 2.0 * std_error_rel);
    if hi >= u128::MAX as f64 {
        return None;
    }
    // Exactly one integer in [lo, hi] iff floor(hi) == ceil(lo).
    let candidate = libm::floor(hi);
    if candidate == libm::ceil(lo) && candidate >= lo {
        Some(candidate as u128)
    } else {
        None
    }
}

/// Finished (or cut off) Monte Carlo estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate {
    /// Samples consumed.
    pub n: u64,
    /// `E_n`, on the solution-count scale.
    pub mean: f64,
    /// `ln E_n`; finite even when `mean` overflows.
    pub log_mean: f64,
    /// `Sigma_n`.
    pub sample_std: f64,
    /// `Sigma_n / (sqrt(n) E_n)`.
    pub std_error_rel: f64,
    pub epsilon: f64,
    pub converged: bool,
    pub state: LogAccumState,
    pub nearest_integer: Option<u128>,
}

/// Progress checkpoint emitted every `checkpoint_interval` samples.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TracePoint {
    pub n: u64,
    pub mean: f64,
    pub std_error_rel: f64,
}

/// One sample of the general estimator: `ln(C |det Psi|^2)` at the
/// sphere point of the given stream index. Pure in `(seed, index)`.
pub fn log_sample_general(sc: &Scenario, log_c: f64, seed: u64, index: u64) -> f64 {
    let point = sample_sphere_point(sc, RngStream::new(seed, index));
    let psi = assemble_psi(sc, &point).expect("sampled point matches the scenario");
    log_c + log_abs_det_sq(&psi.matrix)
        .expect("tight scenarios have square Jacobians")
        .log_abs_det_sq
}

/// One sample of the square symmetric estimator. The scenario must satisfy
/// the square-estimator hypotheses (the caller validates once).
pub fn log_sample_square(sc: &Scenario, log_c: f64, seed: u64, index: u64) -> f64 {
    let point = sample_stiefel_point(sc, RngStream::new(seed, index))
        .expect("caller validated the square-estimator hypotheses");
    let psi = assemble_psi(sc, &point).expect("sampled point matches the scenario");
    log_c + log_abs_det_sq(&psi.matrix)
        .expect("tight scenarios have square Jacobians")
        .log_abs_det_sq
}

fn run_serial(
    cfg: &McConfig,
    mut log_value: impl FnMut(u64) -> f64,
    mut on_checkpoint: impl FnMut(TracePoint),
) -> McEstimate {
    let mut acc = McAccumulator::new();
    for index in 0..cfg.max_samples {
        acc.push(log_value(index));
        let n = acc.n();
        if cfg.checkpoint_interval > 0 && n.is_multiple_of(cfg.checkpoint_interval) {
            on_checkpoint(TracePoint {
                n,
                mean: acc.mean(),
                std_error_rel: acc.std_error_rel(),
            });
        }
        if acc.converged(cfg) {
            break;
        }
    }
    acc.finalize(cfg)
}

/// Estimates the solution count of an arbitrary tight scenario by
/// averaging over unit-sphere channel points.
pub fn estimate_general(sc: &Scenario, cfg: &McConfig) -> Result<McEstimate, HypothesisError> {
    estimate_general_traced(sc, cfg, |_| {})
}

/// [`estimate_general`] with a checkpoint callback for progress traces.
pub fn estimate_general_traced(
    sc: &Scenario,
    cfg: &McConfig,
    on_checkpoint: impl FnMut(TracePoint),
) -> Result<McEstimate, HypothesisError> {
    let log_c = log_constant_general(sc)?.log_value;
    Ok(run_serial(
        cfg,
        |index| log_sample_general(sc, log_c, cfg.seed, index),
        on_checkpoint,
    ))
}

/// Estimates the solution count of a square symmetric tight scenario by
/// averaging over Haar orthonormal frames. Converges much faster than the
/// sphere average.
pub fn estimate_square(sc: &Scenario, cfg: &McConfig) -> Result<McEstimate, HypothesisError> {
    estimate_square_traced(sc, cfg, |_| {})
}

/// [`estimate_square`] with a checkpoint callback.
pub fn estimate_square_traced(
    sc: &Scenario,
    cfg: &McConfig,
    on_checkpoint: impl FnMut(TracePoint),
) -> Result<McEstimate, HypothesisError> {
    let log_c = log_constant_square(sc)?.log_value;
    // Frame shapes exist whenever the constant does (s = 0, K >= 3 force
    // N >= 2d); sample once eagerly so a violation cannot surface later.
    sample_stiefel_point(sc, RngStream::new(cfg.seed, 0))?;
    Ok(run_serial(
        cfg,
        |index| log_sample_square(sc, log_c, cfg.seed, index),
        on_checkpoint,
    ))
}
