//! Small dense kernels: vector arithmetic, a cyclic Jacobi eigensolver for
//! symmetric matrices and a Cholesky solver.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Matrix, Result};

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `y += alpha * x`
#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

#[inline]
pub fn norm2(x: &[f64]) -> f64 {
    libm::sqrt(dot(x, x))
}

pub fn scale(x: &mut [f64], alpha: f64) {
    for v in x {
        *v *= alpha;
    }
}

/// Rescales `x` to unit ℓ₂ norm and returns the original norm. A zero vector
/// is left untouched.
pub fn normalize(x: &mut [f64]) -> f64 {
    let n = norm2(x);
    if n > 0.0 {
        scale(x, 1.0 / n);
    }
    n
}

pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Eigenpairs of a symmetric matrix, sorted by descending eigenvalue.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    /// Eigenvectors stored as the columns of this matrix.
    pub vectors: Matrix,
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
///
/// Sweeps until the off-diagonal mass drops below `1e-15` of the Frobenius
/// norm or 100 sweeps elapse.
pub fn symmetric_eigen(a: &Matrix) -> Result<SymmetricEigen> {
    let n = a.rows();
    if n != a.cols() {
        return Err(Error::invalid(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let mut m = a.clone();
    let mut v = Matrix::identity(n);
    let scale_ref = a.frobenius_norm();
    if scale_ref == 0.0 || !scale_ref.is_finite() {
        if !scale_ref.is_finite() {
            return Err(Error::Numerical(format!(
                "non-finite matrix entries (norm {scale_ref})"
            )));
        }
        return Ok(SymmetricEigen {
            values: vec![0.0; n],
            vectors: v,
        });
    }

    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += m[(i, j)] * m[(i, j)];
            }
        }
        if libm::sqrt(2.0 * off) <= 1e-15 * scale_ref {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + libm::sqrt(theta * theta + 1.0));
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;

                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(j, j)].total_cmp(&m[(i, i)]).then(i.cmp(&j)));
    let values = order.iter().map(|&i| m[(i, i)]).collect();
    let vectors = Matrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(SymmetricEigen { values, vectors })
}

/// Lower-triangular Cholesky factor `L` with `A = L Lᵀ`.
pub fn cholesky(a: &Matrix) -> Result<Matrix> {
    let n = a.rows();
    if n != a.cols() {
        return Err(Error::invalid("cholesky needs a square matrix"));
    }
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::Numerical(format!(
                "matrix is not positive definite (pivot {d} at row {j})"
            )));
        }
        let djj = libm::sqrt(d);
        l[(j, j)] = djj;
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / djj;
        }
    }
    Ok(l)
}

/// Solves `A X = B` for symmetric positive-definite `A`.
pub fn cholesky_solve(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if a.rows() != b.rows() {
        return Err(Error::invalid(format!(
            "right-hand side has {} rows, system has {}",
            b.rows(),
            a.rows()
        )));
    }
    let l = cholesky(a)?;
    let n = a.rows();
    let mut x = b.clone();
    for c in 0..b.cols() {
        // forward: L y = b
        for i in 0..n {
            let mut s = x[(i, c)];
            for k in 0..i {
                s -= l[(i, k)] * x[(k, c)];
            }
            x[(i, c)] = s / l[(i, i)];
        }
        // backward: Lᵀ x = y
        for i in (0..n).rev() {
            let mut s = x[(i, c)];
            for k in (i + 1)..n {
                s -= l[(k, i)] * x[(k, c)];
            }
            x[(i, c)] = s / l[(i, i)];
        }
    }
    if x.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("linear solve produced non-finite values".into()));
    }
    Ok(x)
}

/// Estimates the largest squared singular value of `d` (the top eigenvalue of
/// `DᵀD`) with `iters` steps of power iteration from the all-ones direction.
pub fn top_singular_value_sq(d: &Matrix, iters: usize) -> f64 {
    let p = d.cols();
    if p == 0 || d.rows() == 0 {
        return 0.0;
    }
    let mut x = vec![1.0 / libm::sqrt(p as f64); p];
    let mut estimate = 0.0;
    for _ in 0..iters {
        let dx = d.matvec(&x).expect("dimensions fixed above");
        estimate = dot(&dx, &dx);
        let mut next = d.matvec_transpose(&dx).expect("dimensions fixed above");
        if normalize(&mut next) == 0.0 {
            // all-ones direction is in the null space; fall back to a coordinate sweep
            return (0..p)
                .map(|j| {
                    let c = d.column(j);
                    dot(&c, &c)
                })
                .fold(0.0, f64::max);
        }
        x = next;
    }
    estimate
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_diagonalizes_small_symmetric() {
        let a = Matrix::from_rows(&[[2.0, 1.0], [1.0, 2.0]]).unwrap();
        let e = symmetric_eigen(&a).unwrap();
        assert!((e.values[0] - 3.0).abs() < 1e-14);
        assert!((e.values[1] - 1.0).abs() < 1e-14);
        let v0 = e.vectors.column(0);
        assert!((v0[0].abs() - core::f64::consts::FRAC_1_SQRT_2).abs() < 1e-14);
        assert!((v0[0] - v0[1]).abs() < 1e-14);
    }

    #[test]
    fn cholesky_solves_spd_system() {
        let a = Matrix::from_rows(&[[4.0, 2.0], [2.0, 3.0]]).unwrap();
        let b = Matrix::from_rows(&[[2.0], [1.0]]).unwrap();
        let x = cholesky_solve(&a, &b).unwrap();
        let back = a.matmul(&x).unwrap();
        assert!((back[(0, 0)] - 2.0).abs() < 1e-14);
        assert!((back[(1, 0)] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = Matrix::from_rows(&[[1.0, 2.0], [2.0, 1.0]]).unwrap();
        assert!(matches!(cholesky(&a), Err(Error::Numerical(_))));
    }

    #[test]
    fn power_estimate_on_diagonal() {
        let d = Matrix::from_rows(&[[3.0, 0.0], [0.0, 1.0]]).unwrap();
        assert!((top_singular_value_sq(&d, 50) - 9.0).abs() < 1e-9);
    }
}
