//! Exact solution counts for single-beam networks.
//!
//! With one stream per user the alignment equations factor into products
//! of two linear forms, one in the decoder and one in the precoder, and a
//! solution is a choice of which factor to kill on every link. Recording
//! that choice in a `K x K` table (1 = precoder factor, 0 = decoder
//! factor, diagonal unused) turns counting solutions into counting 0-1
//! tables with prescribed margins: column `l` must hold exactly `M_l - 1`
//! ones and row `k` exactly `N_k - 1` zeros. A backtracking sweep over the
//! cells counts the tables; derangement numbers and labeled 2-regular
//! digraph counts give closed-form cross-checks for the `M = 2` and
//! `M = 3` symmetric families.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::scenario::Scenario;
use crate::HypothesisError;

/// Margin constraints of the 0-1 counting table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarginTable {
    pub size: usize,
    /// Ones required in each column: `M_l - 1`.
    pub col_ones: Vec<usize>,
    /// Ones required in each row: `(K - 1) - (N_k - 1)`.
    pub row_ones: Vec<usize>,
}

impl MarginTable {
    /// Builds the margins for a tight single-beam scenario. Returns `None`
    /// when a margin falls outside `0..=K-1`, in which case no table can
    /// satisfy it and the solution count is zero.
    pub fn from_scenario(sc: &Scenario) -> Result<Option<Self>, HypothesisError> {
        if !sc.is_single_beam() {
            return Err(HypothesisError::MultiBeam);
        }
        let dims = sc.dims();
        if dims.s != 0 {
            return Err(HypothesisError::NotTight { s: dims.s });
        }
        let k = sc.num_users();
        let mut col_ones = Vec::with_capacity(k);
        let mut row_ones = Vec::with_capacity(k);
        for u in sc.users() {
            if u.tx - 1 > k - 1 || u.rx - 1 > k - 1 {
                return Ok(None);
            }
            col_ones.push(u.tx - 1);
            row_ones.push((k - 1) - (u.rx - 1));
        }
        debug_assert_eq!(
            col_ones.iter().sum::<usize>(),
            row_ones.iter().sum::<usize>(),
            "margin sums match exactly when s = 0",
        );
        Ok(Some(MarginTable {
            size: k,
            col_ones,
            row_ones,
        }))
    }
}

/// How an exact count was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CountMethod {
    Backtracking,
    DerangementFormula,
    TwoRegularFormula,
}

/// An exact, arbitrary-precision solution count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactCount {
    pub value: BigUint,
    pub method: CountMethod,
}

/// Exact number of alignment solutions of a tight single-beam scenario,
/// by backtracking over the margin table.
pub fn count_single_beam(sc: &Scenario) -> Result<ExactCount, HypothesisError> {
    let Some(margins) = MarginTable::from_scenario(sc)? else {
        return Ok(ExactCount {
            value: BigUint::zero(),
            method: CountMethod::Backtracking,
        });
    };
    Ok(ExactCount {
        value: count_tables(&margins),
        method: CountMethod::Backtracking,
    })
}

/// Counts 0-1 tables with excluded diagonal meeting the margins, placing
/// cells row-major and pruning as soon as a row or column can no longer
/// meet its quota.
pub fn count_tables(margins: &MarginTable) -> BigUint {
    let k = margins.size;
    if margins.col_ones.iter().sum::<usize>() != margins.row_ones.iter().sum::<usize>() {
        return BigUint::zero();
    }
    let mut state = Search {
        size: k,
        row_need: margins.row_ones.clone(),
        col_need: margins.col_ones.clone(),
        // Off-diagonal cells still undecided in each row/column.
        row_free: vec![k - 1; k],
        col_free: vec![k - 1; k],
    };
    BigUint::from(state.descend(0, 0))
}

struct Search {
    size: usize,
    row_need: Vec<usize>,
    col_need: Vec<usize>,
    row_free: Vec<usize>,
    col_free: Vec<usize>,
}

impl Search {
    fn descend(&mut self, row: usize, col: usize) -> u128 {
        if row == self.size {
            // Margin feasibility was enforced at every cell, so reaching
            // the end means every quota is exactly met.
            return 1;
        }
        let (next_row, next_col) = if col + 1 == self.size {
            (row + 1, 0)
        } else {
            (row, col + 1)
        };
        if row == col {
            return self.descend(next_row, next_col);
        }
        self.row_free[row] -= 1;
        self.col_free[col] -= 1;
        let mut total = 0u128;
        // Place a one.
        if self.row_need[row] > 0 && self.col_need[col] > 0 {
            self.row_need[row] -= 1;
            self.col_need[col] -= 1;
            total = total
                .checked_add(self.descend(next_row, next_col))
                .expect("count exceeds u128");
            self.row_need[row] += 1;
            self.col_need[col] += 1;
        }
        // Leave a zero: only if the remaining cells can still supply the
        // required ones.
        if self.row_need[row] <= self.row_free[row] && self.col_need[col] <= self.col_free[col] {
            total = total
                .checked_add(self.descend(next_row, next_col))
                .expect("count exceeds u128");
        }
        self.row_free[row] += 1;
        self.col_free[col] += 1;
        total
    }
}

/// Number of derangements of `k` elements, by the exact recurrence
/// `D_k = (k-1)(D_{k-1} + D_{k-2})`. Counts `(2x(K-1),1)^K` solutions.
pub fn derangement_count(k: usize) -> Result<ExactCount, HypothesisError> {
    if k < 2 {
        return Err(HypothesisError::TooFewUsers { required: 2, got: k });
    }
    let mut prev = BigUint::zero(); // D_1
    let mut curr = BigUint::one(); // D_2
    for i in 3..=k {
        let next = (prev + &curr) * BigUint::from(i - 1);
        prev = curr;
        curr = next;
    }
    Ok(ExactCount {
        value: curr,
        method: CountMethod::DerangementFormula,
    })
}

/// Number of labeled 2-regular digraphs on `k` nodes, by exact rational
/// evaluation of the closed-form triple sum. Counts `(3x(K-2),1)^K`
/// solutions.
///
/// The power-of-two denominators cancel only across the whole sum, so the
/// terms are accumulated as exact rationals and the result asserted
/// integral.
pub fn two_regular_count(k: usize) -> Result<ExactCount, HypothesisError> {
    if k < 3 {
        return Err(HypothesisError::TooFewUsers { required: 3, got: k });
    }
    let fact: Vec<BigInt> = {
        let mut f = vec![BigInt::one()];
        for i in 1..=2 * k {
            let next = f[i - 1].clone() * BigInt::from(i);
            f.push(next);
        }
        f
    };
    let mut total = BigRational::zero();
    for i in 0..=k {
        for s in 0..=i {
            for j in 0..=(k - i) {
                let numer = &fact[k] * &fact[k - i] * &fact[2 * k - i - 2 * j - s];
                let denom = &fact[s]
                    * &fact[i - s]
                    * (&fact[k - i - j] * &fact[k - i - j])
                    * &fact[j]
                    * BigInt::from(2u8).pow((2 * k - 2 * i - j) as u32);
                let mut term = BigRational::new(numer, denom);
                if (i + j + s) % 2 == 1 {
                    term = -term;
                }
                total += term;
            }
        }
    }
    assert!(total.is_integer(), "triple sum must collapse to an integer");
    assert!(!total.is_negative(), "count must be non-negative");
    let value = total
        .to_integer()
        .to_biguint()
        .expect("non-negative integer");
    Ok(ExactCount {
        value,
        method: CountMethod::TwoRegularFormula,
    })
}

/// Binomial coefficient, for the upper-bound cross-checks.
pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let mut acc = BigUint::one();
    for i in 0..k.min(n - k) {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}
