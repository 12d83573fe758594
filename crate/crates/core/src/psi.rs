//! The structured solution-variety point, the alignment Jacobian, and the
//! feasibility rank test.
//!
//! Every channel matrix is kept in the block form
//!
//! ```text
//! H_kl = [ 0  A ]      A: d_k x (M_l - d_l)
//!        [ B  C ]      B: (N_k - d_k) x d_l,  C: (N_k - d_k) x (M_l - d_l)
//! ```
//!
//! which, together with the canonical decoders/precoders `[I; 0]`, sits on
//! the solution variety by construction: the top-left `d_k x d_l` block of
//! `U_k^T H_kl V_l` is structurally zero.
//!
//! The Jacobian of the alignment equations at such a point is the linear
//! map sending decoder/precoder perturbations to
//! `{ Udot_k^T B_kl + A_kl Vdot_l }` over the links. Its matrix `Psi` is
//! assembled blockwise: the block acting on `vec(Udot_k)` is
//! `(B_kl^T kron I_{d_k}) K_{(N_k-d_k), d_k}` and the block acting on
//! `vec(Vdot_l)` is `(I_{d_l} kron A_kl)`; the shapes admit no other
//! placement, and the bilinear-evaluation oracle in the tests pins the
//! convention. Full row rank of `Psi` at one random point decides
//! feasibility; `|det Psi|^2` averaged over random points counts the
//! solutions.

use alloc::vec::Vec;
use core::fmt;

use crate::linalg::{
    commutation_perm, kron, singular_values, Complex64, ComplexMatrix,
};
use crate::sampling::{sample_gaussian_point, RngStream};
use crate::scenario::{Properness, Scenario};

/// Which distribution a [`ChannelPoint`] was drawn from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointTag {
    /// Free entries i.i.d. complex Gaussian, unnormalized.
    Gaussian,
    /// Each link scaled to unit Frobenius norm.
    UnitSphere,
    /// `A*` and `B` Haar orthonormal frames, `C = 0`.
    Stiefel,
}

/// Free blocks of one link's structured channel.
#[derive(Clone, Debug, PartialEq)]
pub struct LinkBlocks {
    pub a: ComplexMatrix,
    pub b: ComplexMatrix,
    pub c: ComplexMatrix,
}

/// A structured point of the solution variety: one [`LinkBlocks`] per
/// link, in the scenario's link order.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelPoint {
    pub blocks: Vec<LinkBlocks>,
    pub tag: PointTag,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PsiError {
    /// Block list length does not match the scenario link count.
    LinkCountMismatch { expected: usize, got: usize },
    /// A block has the wrong shape for its link.
    BlockShape { link: usize },
}

impl fmt::Display for PsiError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PsiError::LinkCountMismatch { expected, got } => {
                write!(f, "expected blocks for {expected} links, got {got}")
            }
            PsiError::BlockShape { link } => {
                write!(f, "block shapes do not match the scenario on link {link}")
            }
        }
    }
}

impl ChannelPoint {
    /// Checks that every block has the shape the scenario dictates.
    pub fn validate(&self, sc: &Scenario) -> Result<(), PsiError> {
        if self.blocks.len() != sc.links().len() {
            return Err(PsiError::LinkCountMismatch {
                expected: sc.links().len(),
                got: self.blocks.len(),
            });
        }
        for (idx, (&(k, l), blocks)) in sc.links().iter().zip(&self.blocks).enumerate() {
            let rx = sc.user(k);
            let tx = sc.user(l);
            let ok = blocks.a.rows() == rx.streams
                && blocks.a.cols() == tx.tx - tx.streams
                && blocks.b.rows() == rx.rx - rx.streams
                && blocks.b.cols() == tx.streams
                && blocks.c.rows() == rx.rx - rx.streams
                && blocks.c.cols() == tx.tx - tx.streams;
            if !ok {
                return Err(PsiError::BlockShape { link: idx });
            }
        }
        Ok(())
    }

    /// Materializes the full `N_k x M_l` channel matrix of one link.
    pub fn channel_matrix(&self, sc: &Scenario, link_idx: usize) -> ComplexMatrix {
        let (k, l) = sc.links()[link_idx];
        let rx = sc.user(k);
        let tx = sc.user(l);
        let blocks = &self.blocks[link_idx];
        let mut h = ComplexMatrix::zeros(rx.rx, tx.tx);
        h.set_block(0, tx.streams, &blocks.a);
        h.set_block(rx.streams, 0, &blocks.b);
        h.set_block(rx.streams, tx.streams, &blocks.c);
        h
    }
}

/// A structured point with its channels, decoders and precoders fully
/// materialized.
#[derive(Clone, Debug)]
pub struct CanonicalPoint {
    /// `H_kl` per link, in link order.
    pub channels: Vec<ComplexMatrix>,
    /// `U_k = [I; 0]`, `N_k x d_k`.
    pub decoders: Vec<ComplexMatrix>,
    /// `V_l = [I; 0]`, `M_l x d_l`.
    pub precoders: Vec<ComplexMatrix>,
}

impl CanonicalPoint {
    /// Largest alignment residual `max_kl ||U_k^T H_kl V_l||_F`. Zero by
    /// construction: the product picks out the structural zero block.
    pub fn alignment_residual(&self, sc: &Scenario) -> f64 {
        sc.links()
            .iter()
            .zip(&self.channels)
            .map(|(&(k, l), h)| {
                self.decoders[k]
                    .transpose()
                    .mul(h)
                    .mul(&self.precoders[l])
                    .frobenius_norm()
            })
            .fold(0.0, f64::max)
    }
}

fn axis_frame(rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |r, c| {
        if r == c {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Materializes the full channels and the canonical `[I; 0]` decoders and
/// precoders for a structured point.
pub fn canonical_point(sc: &Scenario, point: &ChannelPoint) -> Result<CanonicalPoint, PsiError> {
    point.validate(sc)?;
    let channels = (0..sc.links().len())
        .map(|idx| point.channel_matrix(sc, idx))
        .collect();
    let decoders = sc.users().iter().map(|u| axis_frame(u.rx, u.streams)).collect();
    let precoders = sc.users().iter().map(|u| axis_frame(u.tx, u.streams)).collect();
    Ok(CanonicalPoint {
        channels,
        decoders,
        precoders,
    })
}

/// The assembled alignment Jacobian with its block index maps.
#[derive(Clone, Debug)]
pub struct PsiMatrix {
    pub matrix: ComplexMatrix,
    /// Row offset of each link's equation block, in link order.
    pub row_offsets: Vec<usize>,
    /// Column offset of each user's decoder-perturbation block.
    pub decoder_col_offsets: Vec<usize>,
    /// Column offset of each user's precoder-perturbation block.
    pub precoder_col_offsets: Vec<usize>,
}

impl PsiMatrix {
    /// Row offset of the equation block for link `(rx, tx)`.
    pub fn row_offset(&self, sc: &Scenario, rx: usize, tx: usize) -> Option<usize> {
        sc.links()
            .iter()
            .position(|&pair| pair == (rx, tx))
            .map(|idx| self.row_offsets[idx])
    }
}

/// Assembles the Jacobian matrix from a structured point.
///
/// Column layout: decoder blocks for users `0..K`, then precoder blocks
/// for users `0..K`. Each link's row block has exactly two nonzero column
/// blocks, mirroring the incidence structure of the connectivity graph.
pub fn assemble_psi(sc: &Scenario, point: &ChannelPoint) -> Result<PsiMatrix, PsiError> {
    point.validate(sc)?;
    let dims = sc.dims();

    let mut decoder_col_offsets = Vec::with_capacity(sc.num_users());
    let mut precoder_col_offsets = Vec::with_capacity(sc.num_users());
    let mut col = 0usize;
    for u in sc.users() {
        decoder_col_offsets.push(col);
        col += (u.rx - u.streams) * u.streams;
    }
    for u in sc.users() {
        precoder_col_offsets.push(col);
        col += (u.tx - u.streams) * u.streams;
    }
    debug_assert_eq!(col, dims.psi_cols);

    let mut matrix = ComplexMatrix::zeros(dims.psi_rows, dims.psi_cols);
    let mut row_offsets = Vec::with_capacity(sc.links().len());
    let mut row = 0usize;
    for (&(k, l), blocks) in sc.links().iter().zip(&point.blocks) {
        row_offsets.push(row);
        let rx = sc.user(k);
        let tx = sc.user(l);
        // vec(Udot_k^T B) = (B^T kron I) K vec(Udot_k); the commutation
        // factor is a column reorder of the Kronecker block.
        let decoder_block = kron(&blocks.b.transpose(), &ComplexMatrix::identity(rx.streams))
            .permuted_columns(&commutation_perm(rx.rx - rx.streams, rx.streams));
        // vec(A Vdot_l) = (I kron A) vec(Vdot_l).
        let precoder_block = kron(&ComplexMatrix::identity(tx.streams), &blocks.a);
        matrix.set_block(row, decoder_col_offsets[k], &decoder_block);
        matrix.set_block(row, precoder_col_offsets[l], &precoder_block);
        row += rx.streams * tx.streams;
    }
    debug_assert_eq!(row, dims.psi_rows);

    Ok(PsiMatrix {
        matrix,
        row_offsets,
        decoder_col_offsets,
        precoder_col_offsets,
    })
}

/// Outcome of the feasibility test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Feasibility {
    /// `s < 0`: more equations than variables.
    Improper,
    /// The Jacobian is row-rank deficient at a generic point.
    Infeasible,
    /// The Jacobian has full row rank at a generic point.
    Feasible,
}

impl fmt::Display for Feasibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Feasibility::Improper => write!(f, "improper"),
            Feasibility::Infeasible => write!(f, "infeasible"),
            Feasibility::Feasible => write!(f, "feasible"),
        }
    }
}

/// Feasibility verdict plus the spectrum diagnostic that produced it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FeasibilityReport {
    pub verdict: Feasibility,
    /// Smallest of the `psi_rows` singular values at the tested point
    /// (zero when no point was tested).
    pub sigma_min: f64,
    pub sigma_max: f64,
}

/// Relative singular-value threshold for "full row rank". Gaussian points
/// of feasible systems sit many orders of magnitude above this; rank
/// deficiency is point-independent and lands many orders below.
pub const RANK_THRESHOLD: f64 = 1e-8;

/// Decides feasibility: `improper` when `s < 0`, otherwise a row-rank
/// check of the Jacobian at one random Gaussian point.
pub fn feasibility_test(sc: &Scenario, seed: u64) -> FeasibilityReport {
    feasibility_test_with(sc, seed, 1, RANK_THRESHOLD)
}

/// Feasibility with an odd number of trial points (majority vote) and an
/// explicit rank threshold. Repeated draws only guard against measure-zero
/// bad luck; one point is already decisive for a generic scenario.
pub fn feasibility_test_with(
    sc: &Scenario,
    seed: u64,
    trials: usize,
    threshold: f64,
) -> FeasibilityReport {
    assert!(trials >= 1 && trials % 2 == 1, "trials must be odd");
    if sc.dims().properness() == Properness::Improper {
        return FeasibilityReport {
            verdict: Feasibility::Improper,
            sigma_min: 0.0,
            sigma_max: 0.0,
        };
    }
    let mut feasible_votes = 0usize;
    let mut reports = Vec::with_capacity(trials);
    for trial in 0..trials {
        let point = sample_gaussian_point(sc, RngStream::new(seed, trial as u64));
        let psi = assemble_psi(sc, &point).expect("sampled point always matches the scenario");
        let sigma = singular_values(&psi.matrix);
        let rows = psi.matrix.rows();
        let sigma_max = sigma.first().copied().unwrap_or(0.0);
        // Full row rank needs all `psi_rows` leading singular values.
        let sigma_min = sigma.get(rows.saturating_sub(1)).copied().unwrap_or(0.0);
        let feasible = rows == 0 || (sigma_max > 0.0 && sigma_min > threshold * sigma_max);
        if feasible {
            feasible_votes += 1;
        }
        reports.push((feasible, sigma_min, sigma_max));
    }
    let majority = feasible_votes * 2 > trials;
    let &(_, sigma_min, sigma_max) = reports
        .iter()
        .find(|(f, _, _)| *f == majority)
        .expect("majority verdict has a witness");
    FeasibilityReport {
        verdict: if majority {
            Feasibility::Feasible
        } else {
            Feasibility::Infeasible
        },
        sigma_min,
        sigma_max,
    }
}
