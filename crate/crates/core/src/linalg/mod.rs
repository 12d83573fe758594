//! Dense complex linear algebra used by the rest of the crate: Kronecker
//! products, commutation matrices, and the factorizations behind the
//! determinant and rank tests.
//!
//! Everything is double-precision and dense; the Jacobians this crate
//! builds are at most a few hundred rows, so sparse machinery would buy
//! nothing. The `vec` convention is column stacking throughout.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Index, IndexMut};

pub use num_complex::Complex;

pub type Complex64 = Complex<f64>;

mod decomp;

pub use decomp::{log_abs_det_sq, singular_values, thin_qr, LogDet};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LinalgError {
    /// Entry data contained a NaN or infinity.
    NonFinite,
    /// Entry count does not match the requested shape.
    BadLength { expected: usize, got: usize },
    /// A square matrix was required.
    NotSquare { rows: usize, cols: usize },
}

impl fmt::Display for LinalgError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinalgError::NonFinite => write!(f, "matrix entries must be finite"),
            LinalgError::BadLength { expected, got } => {
                write!(f, "expected {expected} entries, got {got}")
            }
            LinalgError::NotSquare { rows, cols } => {
                write!(f, "matrix must be square, got {rows}x{cols}")
            }
        }
    }
}

/// Dense complex matrix, row-major storage.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting NaN/Inf.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::BadLength {
                expected: rows * cols,
                got: data.len(),
            });
        }
        if !data.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(LinalgError::NonFinite);
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Fills from a function of `(row, col)`. Panics on non-finite values.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                let z = f(r, c);
                assert!(z.re.is_finite() && z.im.is_finite(), "non-finite entry");
                data.push(z);
            }
        }
        ComplexMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn scaled(&self, factor: f64) -> Self {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matrix product");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let src = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += a * s;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, x.len(), "dimension mismatch in matrix-vector product");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .map(|(a, b)| a * b)
                    .sum::<Complex64>()
            })
            .collect()
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn frobenius_norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.frobenius_norm_sqr())
    }

    /// Column-stacked vectorization.
    pub fn vec_columns(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.rows * self.cols);
        for c in 0..self.cols {
            for r in 0..self.rows {
                out.push(self[(r, c)]);
            }
        }
        out
    }

    /// Copies `block` into this matrix with its top-left corner at
    /// `(row, col)`.
    pub fn set_block(&mut self, row: usize, col: usize, block: &ComplexMatrix) {
        assert!(row + block.rows <= self.rows && col + block.cols <= self.cols);
        for r in 0..block.rows {
            let dst = &mut self.data[(row + r) * self.cols + col..];
            dst[..block.cols].copy_from_slice(block.row(r));
        }
    }

    /// Reorders columns so that column `c` of the result is column
    /// `perm[c]` of `self`. Right-multiplying by a permutation matrix `P`
    /// with `P[perm[c]][c] = 1` does the same thing.
    pub fn permuted_columns(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.cols);
        Self::from_fn(self.rows, self.cols, |r, c| self[(r, perm[c])])
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

/// Kronecker product `a (x) b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(a.rows * b.rows, a.cols * b.cols);
    for ar in 0..a.rows {
        for ac in 0..a.cols {
            let v = a[(ar, ac)];
            for br in 0..b.rows {
                let dst_row = ar * b.rows + br;
                let dst = &mut out.data[dst_row * out.cols + ac * b.cols..];
                for (d, s) in dst[..b.cols].iter_mut().zip(b.row(br)) {
                    *d = v * s;
                }
            }
        }
    }
    out
}

/// Permutation underlying the `(m, n)` commutation matrix: column `c` of
/// `M * K_{m,n}` is column `commutation_perm(m, n)[c]` of `M`.
pub fn commutation_perm(m: usize, n: usize) -> Vec<usize> {
    let mut perm = vec![0usize; m * n];
    for i in 0..m {
        for j in 0..n {
            perm[i + m * j] = j + n * i;
        }
    }
    perm
}

/// The `mn x mn` commutation matrix `K_{m,n}` mapping `vec(X)` to
/// `vec(X^T)` for every `m x n` matrix `X`.
pub fn commutation_matrix(m: usize, n: usize) -> ComplexMatrix {
    let perm = commutation_perm(m, n);
    let mut k = ComplexMatrix::zeros(m * n, m * n);
    for (c, &p) in perm.iter().enumerate() {
        k[(p, c)] = Complex64::new(1.0, 0.0);
    }
    k
}
