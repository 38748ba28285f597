use alloc::format;
use alloc::vec::Vec;

use super::solver::check_component_count;
use super::{ComponentBasis, LoadingVector};
use crate::linalg::{self, symmetric_eigen};
use crate::{Error, Matrix, Result};

/// Eigenvalues below this fraction of the largest are treated as zero.
const RANK_TOL: f64 = 1e-12;

/// Top-`k` eigenvectors of `DᵀD` in descending eigenvalue order, each with
/// its largest-magnitude entry made positive.
///
/// When `n < p` the `n × n` Gram matrix `DDᵀ` is decomposed instead and its
/// eigenvectors are mapped through `Dᵀ`. If `k` exceeds the numerical rank,
/// the remaining columns complete an orthonormal set from the coordinate axes.
pub fn fit_pca(d: &Matrix, k: usize) -> Result<ComponentBasis> {
    check_component_count(d, k)?;
    let (n, p) = d.shape();

    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(k);
    if p <= n {
        let eig = symmetric_eigen(&d.gram_cols())?;
        let top = eig.values.first().copied().unwrap_or(0.0);
        for (j, &lambda) in eig.values.iter().enumerate().take(k) {
            if lambda <= RANK_TOL * top || top <= 0.0 {
                break;
            }
            vectors.push(eig.vectors.column(j));
        }
    } else {
        let eig = symmetric_eigen(&d.gram_rows())?;
        let top = eig.values.first().copied().unwrap_or(0.0);
        for (j, &lambda) in eig.values.iter().enumerate() {
            if vectors.len() == k || lambda <= RANK_TOL * top || top <= 0.0 {
                break;
            }
            let mut v = d.matvec_transpose(&eig.vectors.column(j))?;
            orthogonalize(&mut v, &vectors);
            if linalg::normalize(&mut v) == 0.0 {
                break;
            }
            vectors.push(v);
        }
    }

    // complete from coordinate axes beyond the numerical rank
    let mut axis = 0;
    while vectors.len() < k {
        if axis == p {
            return Err(Error::Numerical(format!(
                "could not complete an orthonormal basis of {k} vectors in dimension {p}"
            )));
        }
        let mut e = alloc::vec![0.0; p];
        e[axis] = 1.0;
        axis += 1;
        orthogonalize(&mut e, &vectors);
        orthogonalize(&mut e, &vectors);
        if linalg::normalize(&mut e) > 1e-8 {
            vectors.push(e);
        }
    }

    let columns = vectors
        .into_iter()
        .map(|mut v| {
            fix_sign(&mut v);
            LoadingVector::new(v)
        })
        .collect();
    ComponentBasis::new(columns)
}

fn orthogonalize(v: &mut [f64], against: &[Vec<f64>]) {
    for u in against {
        let c = linalg::dot(v, u);
        linalg::axpy(-c, u, v);
    }
}

fn fix_sign(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v[best] < 0.0 {
        linalg::scale(v, -1.0);
    }
}

/// `X · V`, where `V` holds the basis loadings as columns.
pub fn project(x: &Matrix, basis: &ComponentBasis) -> Result<Matrix> {
    if x.cols() != basis.dim() {
        return Err(Error::invalid(format!(
            "data has {} features, basis has dimension {}",
            x.cols(),
            basis.dim()
        )));
    }
    let cols = basis.columns();
    let mut out = Matrix::zeros(x.rows(), cols.len());
    for (i, row) in x.row_iter().enumerate() {
        for (j, c) in cols.iter().enumerate() {
            out[(i, j)] = linalg::dot(row, c.values());
        }
    }
    Ok(out)
}
