//! Factorizations: partial-pivot LU for log-determinants, Householder QR
//! for orthonormal frames, and a one-sided Jacobi SVD for singular values.

use alloc::vec::Vec;

use super::{Complex64, ComplexMatrix, LinalgError};

/// `log(|det M|^2)` of a square matrix, with `-inf` for singular input.
///
/// Determinant magnitudes in this crate routinely span hundreds of orders
/// of magnitude, so they never leave the log domain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogDet {
    pub log_abs_det_sq: f64,
}

impl LogDet {
    pub fn is_singular(&self) -> bool {
        self.log_abs_det_sq == f64::NEG_INFINITY
    }
}

/// Computes `log(|det M|^2)` by partial-pivot LU: twice the sum of the log
/// pivot magnitudes. Returns `-inf` as soon as a pivot column vanishes.
pub fn log_abs_det_sq(m: &ComplexMatrix) -> Result<LogDet, LinalgError> {
    if m.rows() != m.cols() {
        return Err(LinalgError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    let mut a: Vec<Complex64> = m.data().to_vec();
    let mut acc = 0.0f64;
    for k in 0..n {
        // Pivot on squared magnitude; no square roots needed.
        let mut pivot_row = k;
        let mut best = a[k * n + k].norm_sqr();
        for i in (k + 1)..n {
            let v = a[i * n + k].norm_sqr();
            if v > best {
                best = v;
                pivot_row = i;
            }
        }
        if best == 0.0 {
            return Ok(LogDet {
                log_abs_det_sq: f64::NEG_INFINITY,
            });
        }
        if pivot_row != k {
            for j in 0..n {
                a.swap(k * n + j, pivot_row * n + j);
            }
        }
        // best == |u_kk|^2, so this accumulates 2 * sum log |u_kk|.
        acc += libm::log(best);
        let pivot = a[k * n + k];
        let (top, below) = a.split_at_mut((k + 1) * n);
        let row_k = &top[k * n + k + 1..k * n + n];
        for row_i in below.chunks_exact_mut(n) {
            let factor = row_i[k] / pivot;
            if factor == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (x, y) in row_i[k + 1..].iter_mut().zip(row_k) {
                *x -= factor * y;
            }
        }
    }
    Ok(LogDet {
        log_abs_det_sq: acc,
    })
}

/// Singular values in descending order, by one-sided Jacobi rotations.
///
/// Jacobi converges slowly compared to bidiagonalization but is simple,
/// backward stable, and accurate for the small-to-medium dense matrices
/// this crate produces.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    // Work on the tall orientation so rotations act on the short side.
    let a = if m.rows() >= m.cols() {
        m.clone()
    } else {
        m.conj_transpose()
    };
    let cols = a.cols();
    let mut col: Vec<Vec<Complex64>> = (0..cols)
        .map(|j| (0..a.rows()).map(|i| a[(i, j)]).collect())
        .collect();

    const TOL: f64 = 1e-15;
    const MAX_SWEEPS: usize = 64;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let (mut app, mut aqq) = (0.0f64, 0.0f64);
                let mut apq = Complex64::new(0.0, 0.0);
                for (x, y) in col[p].iter().zip(&col[q]) {
                    app += x.norm_sqr();
                    aqq += y.norm_sqr();
                    apq += x.conj() * y;
                }
                if apq.norm_sqr() <= TOL * TOL * app * aqq || apq.norm_sqr() == 0.0 {
                    continue;
                }
                rotated = true;
                let abs_pq = libm::sqrt(apq.norm_sqr());
                let phase = apq / abs_pq;
                let zeta = (aqq - app) / (2.0 * abs_pq);
                let t = if zeta == 0.0 {
                    1.0
                } else {
                    let sign = if zeta > 0.0 { 1.0 } else { -1.0 };
                    sign / (libm::fabs(zeta) + libm::sqrt(1.0 + zeta * zeta))
                };
                let cs = 1.0 / libm::sqrt(1.0 + t * t);
                let sn = cs * t;
                let phase_conj = phase.conj();
                let (head, tail) = col.split_at_mut(q);
                let cp = &mut head[p];
                let cq = &mut tail[0];
                for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
                    let new_x = *x * cs - *y * (phase_conj * sn);
                    let new_y = *x * (phase * sn) + *y * cs;
                    *x = new_x;
                    *y = new_y;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut sigma: Vec<f64> = col
        .iter()
        .map(|c| libm::sqrt(c.iter().map(|z| z.norm_sqr()).sum()))
        .collect();
    sigma.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sigma
}

/// Thin Householder QR of a tall matrix (`rows >= cols`): returns `(Q, R)`
/// with `Q` of shape `rows x cols` having orthonormal columns and `R`
/// upper triangular `cols x cols`, so `Q * R == M`.
///
/// The diagonal of `R` carries arbitrary phases; callers that need the
/// unique factorization fix them afterwards.
pub fn thin_qr(m: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let (rows, cols) = (m.rows(), m.cols());
    assert!(rows >= cols, "thin_qr needs rows >= cols");
    let mut a = m.clone();
    let mut reflectors: Vec<Vec<Complex64>> = Vec::with_capacity(cols);

    for j in 0..cols {
        let tail = rows - j;
        let mut v: Vec<Complex64> = (0..tail).map(|i| a[(j + i, j)]).collect();
        let norm = libm::sqrt(v.iter().map(|z| z.norm_sqr()).sum());
        if norm == 0.0 {
            reflectors.push(Vec::new());
            continue;
        }
        let x0 = v[0];
        let alpha = if x0 == Complex64::new(0.0, 0.0) {
            Complex64::new(-norm, 0.0)
        } else {
            -(x0 / libm::sqrt(x0.norm_sqr())) * norm
        };
        v[0] -= alpha;
        let vnorm = libm::sqrt(v.iter().map(|z| z.norm_sqr()).sum());
        if vnorm == 0.0 {
            // Column already aligned with the axis.
            reflectors.push(Vec::new());
            continue;
        }
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        apply_reflector(&mut a, j, &v, j);
        reflectors.push(v);
    }

    let mut r = ComplexMatrix::zeros(cols, cols);
    for i in 0..cols {
        for j in i..cols {
            r[(i, j)] = a[(i, j)];
        }
    }

    // Accumulate the thin Q by applying the reflectors, last first, to the
    // leading columns of the identity.
    let mut q = ComplexMatrix::from_fn(rows, cols, |r_, c_| {
        if r_ == c_ {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    for j in (0..cols).rev() {
        if !reflectors[j].is_empty() {
            apply_reflector(&mut q, j, &reflectors[j], 0);
        }
    }
    (q, r)
}

/// Applies `I - 2 w w*` to the rows `start..` of `m`, touching columns
/// `from_col..` only.
fn apply_reflector(m: &mut ComplexMatrix, start: usize, w: &[Complex64], from_col: usize) {
    for c in from_col..m.cols() {
        let mut s = Complex64::new(0.0, 0.0);
        for (i, wi) in w.iter().enumerate() {
            s += wi.conj() * m[(start + i, c)];
        }
        s *= 2.0;
        for (i, wi) in w.iter().enumerate() {
            let v = m[(start + i, c)] - s * wi;
            m[(start + i, c)] = v;
        }
    }
}
