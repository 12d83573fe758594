//! Core algorithms for counting interference-alignment solutions in K-user
//! MIMO interference channels.
//!
//! The crate answers two questions about a network scenario such as
//! `(2x2,1)^3`:
//!
//! * is linear interference alignment feasible at the requested stream
//!   counts, and
//! * when the system is tightly feasible (variables match equations),
//!   how many distinct alignment solutions exist?
//!
//! Single-beam networks are counted exactly by combinatorial enumeration
//! ([`exact`]); arbitrary tightly feasible networks are counted
//! approximately by Monte Carlo averaging of a scaled determinant over
//! random channel points ([`mc`]). Feasibility itself is decided by a
//! rank test on the alignment Jacobian ([`psi`]).
//!
//! The crate is `no_std` (with `alloc`); all IO, parallelism and the
//! command-line front end live in the companion `iacount` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod exact;
pub mod linalg;
pub mod mc;
pub mod psi;
pub mod sampling;
pub mod scenario;

pub use exact::{count_single_beam, derangement_count, two_regular_count, ExactCount};
pub use linalg::{ComplexMatrix, Complex64};
pub use mc::{estimate_general, estimate_square, McConfig, McEstimate};
pub use psi::{assemble_psi, feasibility_test, Feasibility, PsiMatrix};
pub use scenario::{parse_scenario, Scenario, ScenarioDims};

use core::fmt;

/// Violation of a precondition of one of the counting procedures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HypothesisError {
    /// The scenario is not tight (`s != 0`); solution counts are only
    /// defined for tightly feasible systems.
    NotTight { s: i64 },
    /// An operation restricted to square symmetric scenarios
    /// (`(NxN,d)^K`) was called on something else.
    NotSquareSymmetric,
    /// An operation restricted to single-beam scenarios (all `d_k = 1`)
    /// was called on a multi-beam one.
    MultiBeam,
    /// Fewer users than the operation supports.
    TooFewUsers { required: usize, got: usize },
    /// Orthonormal frames of the requested shape do not exist
    /// (needs `N >= 2d`).
    NarrowFrames { n: usize, d: usize },
}

impl fmt::Display for HypothesisError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HypothesisError::NotTight { s } => {
                write!(f, "scenario is not tight: s = {s} (must be 0)")
            }
            HypothesisError::NotSquareSymmetric => {
                write!(f, "scenario is not square symmetric ((NxN,d)^K required)")
            }
            HypothesisError::MultiBeam => {
                write!(f, "scenario is not single-beam (all stream counts must be 1)")
            }
            HypothesisError::TooFewUsers { required, got } => {
                write!(f, "needs at least {required} users, got {got}")
            }
            HypothesisError::NarrowFrames { n, d } => {
                write!(f, "orthonormal frame sampling needs N >= 2d, got N = {n}, d = {d}")
            }
        }
    }
}
