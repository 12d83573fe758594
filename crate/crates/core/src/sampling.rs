//! Random channel points for the two Monte Carlo integration domains:
//! unit-Frobenius-sphere channels and Haar-uniform orthonormal frames.
//!
//! Reproducibility contract: every sample is a pure function of
//! `(master_seed, stream_id)`, one counter-based stream per sample index,
//! so parallel and serial runs integrate identical sample sets.

use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};

use crate::linalg::{thin_qr, Complex64, ComplexMatrix};
use crate::psi::{ChannelPoint, LinkBlocks, PointTag};
use crate::scenario::Scenario;
use crate::HypothesisError;

/// A deterministic substream of the master generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RngStream {
    pub master_seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        RngStream {
            master_seed,
            stream_id,
        }
    }

    pub fn rng(&self) -> ChaCha12Rng {
        let mut rng = ChaCha12Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// Uniform draw in `(0, 1]`; never zero, so logs are safe.
#[inline]
fn uniform_open_closed(rng: &mut ChaCha12Rng) -> f64 {
    ((rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform draw in `[0, 1)`.
#[inline]
fn uniform_half_open(rng: &mut ChaCha12Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Standard complex Gaussian: squared modulus exponential, phase uniform.
#[inline]
pub fn complex_gaussian(rng: &mut ChaCha12Rng) -> Complex64 {
    let radius = libm::sqrt(-libm::log(uniform_open_closed(rng)));
    let theta = 2.0 * core::f64::consts::PI * uniform_half_open(rng);
    Complex64::new(radius * libm::cos(theta), radius * libm::sin(theta))
}

pub fn gaussian_matrix(rows: usize, cols: usize, rng: &mut ChaCha12Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Haar-uniform orthonormal `d`-frame in `C^m` (`m >= d`), via QR of a
/// Gaussian matrix with the R-diagonal phases pushed into Q.
///
/// The phase fix is what makes the draw Haar: the QR factorization is only
/// unique once the diagonal of R is real positive, and the Q of that
/// unique factorization is the Haar-distributed one. Skipping it biases
/// the frames.
pub fn haar_frame(m: usize, d: usize, rng: &mut ChaCha12Rng) -> ComplexMatrix {
    let g = gaussian_matrix(m, d, rng);
    let (q, r) = thin_qr(&g);
    let mut fixed = q;
    for j in 0..d {
        let rjj = r[(j, j)];
        let mag = libm::sqrt(rjj.norm_sqr());
        let phase = if mag == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            rjj / mag
        };
        for i in 0..m {
            let v = fixed[(i, j)] * phase;
            fixed[(i, j)] = v;
        }
    }
    fixed
}

/// Unnormalized structured point: every free block entry i.i.d. standard
/// complex Gaussian. Used by the feasibility rank test, where scale is
/// irrelevant.
pub fn sample_gaussian_point(sc: &Scenario, stream: RngStream) -> ChannelPoint {
    let mut rng = stream.rng();
    let blocks = sc
        .links()
        .iter()
        .map(|&(k, l)| {
            let rx = sc.user(k);
            let tx = sc.user(l);
            LinkBlocks {
                a: gaussian_matrix(rx.streams, tx.tx - tx.streams, &mut rng),
                b: gaussian_matrix(rx.rx - rx.streams, tx.streams, &mut rng),
                c: gaussian_matrix(rx.rx - rx.streams, tx.tx - tx.streams, &mut rng),
            }
        })
        .collect();
    ChannelPoint {
        blocks,
        tag: PointTag::Gaussian,
    }
}

/// Point on the integration domain of the general estimator: Gaussian
/// blocks, then each link's channel rescaled to unit Frobenius norm.
///
/// The normalization must cover all free entries of the link jointly,
/// including the `C` block the Jacobian never reads; anything else is not
/// uniform on the per-link unit sphere of the structured channel space.
pub fn sample_sphere_point(sc: &Scenario, stream: RngStream) -> ChannelPoint {
    let mut point = sample_gaussian_point(sc, stream);
    for link in point.blocks.iter_mut() {
        let norm_sqr = link.a.frobenius_norm_sqr()
            + link.b.frobenius_norm_sqr()
            + link.c.frobenius_norm_sqr();
        let inv = 1.0 / libm::sqrt(norm_sqr);
        link.a = link.a.scaled(inv);
        link.b = link.b.scaled(inv);
        link.c = link.c.scaled(inv);
    }
    point.tag = PointTag::UnitSphere;
    point
}

/// Point on the integration domain of the square-symmetric estimator:
/// independent Haar frames for `A*` and `B` on every link, `C = 0`.
///
/// Requires a square symmetric scenario with `N >= 2d` so that the
/// `(N-d) x d` frames exist.
pub fn sample_stiefel_point(
    sc: &Scenario,
    stream: RngStream,
) -> Result<ChannelPoint, HypothesisError> {
    let dims = sc.dims();
    if !dims.is_square_symmetric {
        return Err(HypothesisError::NotSquareSymmetric);
    }
    let n = sc.user(0).rx;
    let d = sc.user(0).streams;
    if n < 2 * d {
        return Err(HypothesisError::NarrowFrames { n, d });
    }
    let mut rng = stream.rng();
    let blocks = sc
        .links()
        .iter()
        .map(|_| {
            // A has orthonormal rows (its adjoint is the sampled frame),
            // B has orthonormal columns.
            let a = haar_frame(n - d, d, &mut rng).conj_transpose();
            let b = haar_frame(n - d, d, &mut rng);
            LinkBlocks {
                a,
                b,
                c: ComplexMatrix::zeros(n - d, n - d),
            }
        })
        .collect();
    Ok(ChannelPoint {
        blocks,
        tag: PointTag::Stiefel,
    })
}
