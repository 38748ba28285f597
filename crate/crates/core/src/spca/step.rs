use alloc::vec::Vec;
use core::cell::Cell;

use crate::{linalg, Matrix, Result};

/// `∇g(x) = -2 Dᵀ(D x)`, as two matrix-vector products.
pub fn grad_g(d: &Matrix, x: &[f64]) -> Result<Vec<f64>> {
    let dx = d.matvec(x)?;
    let mut g = d.matvec_transpose(&dx)?;
    linalg::scale(&mut g, -2.0);
    Ok(g)
}

/// `f(x) = -‖Dx‖² + λ‖x‖₁`. Diagnostics only; no update reads it.
pub fn objective(d: &Matrix, x: &[f64], lambda: f64) -> Result<f64> {
    let dx = d.matvec(x)?;
    let l1: f64 = x.iter().map(|v| v.abs()).sum();
    Ok(-linalg::dot(&dx, &dx) + lambda * l1)
}

/// Proximal map of `θ‖·‖₁`: `(|v_i| - θ)₊ · sign(v_i)`, with `sign(0) = 0`.
pub fn soft_threshold(v: &[f64], theta: f64) -> Vec<f64> {
    v.iter()
        .map(|&vi| {
            let mag = vi.abs() - theta;
            if mag > 0.0 {
                if vi > 0.0 {
                    mag
                } else {
                    -mag
                }
            } else {
                0.0
            }
        })
        .collect()
}

/// The data matrix of `g` plus a gradient-evaluation counter.
#[derive(Debug)]
pub struct SpcaObjective<'a> {
    data: &'a Matrix,
    evals: Cell<usize>,
}

impl<'a> SpcaObjective<'a> {
    pub fn new(data: &'a Matrix) -> Self {
        SpcaObjective {
            data,
            evals: Cell::new(0),
        }
    }

    pub fn data(&self) -> &Matrix {
        self.data
    }

    pub fn dim(&self) -> usize {
        self.data.cols()
    }

    /// [`grad_g`], counted.
    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        let g = grad_g(self.data, x)?;
        self.evals.set(self.evals.get() + 1);
        Ok(g)
    }

    pub fn gradient_evals(&self) -> usize {
        self.evals.get()
    }
}

/// `x - t ∇g(x)`
fn euler(obj: &SpcaObjective<'_>, x: &[f64], t: f64) -> Result<Vec<f64>> {
    let g = obj.gradient(x)?;
    Ok(x.iter().zip(&g).map(|(xi, gi)| xi - t * gi).collect())
}

/// One proximal-gradient pass: `prox_{λt}((I + 2tDᵀD) x)`.
pub fn ista_step(obj: &SpcaObjective<'_>, x: &[f64], t: f64, lambda: f64) -> Result<Vec<f64>> {
    let moved = euler(obj, x, t)?;
    Ok(soft_threshold(&moved, lambda * t))
}

/// `x - t ∇g(x - t ∇g(x))`. No prox.
pub fn rk_coarse_step(obj: &SpcaObjective<'_>, x: &[f64], t: f64) -> Result<Vec<f64>> {
    let half = euler(obj, x, t)?;
    let g = obj.gradient(&half)?;
    Ok(x.iter().zip(&g).map(|(xi, gi)| xi - t * gi).collect())
}

/// Classical RK4 on `ẋ = -∇g(x)`. No prox.
pub fn rk4_step(obj: &SpcaObjective<'_>, x: &[f64], t: f64) -> Result<Vec<f64>> {
    let slope = |at: &[f64]| -> Result<Vec<f64>> {
        let mut s = obj.gradient(at)?;
        linalg::scale(&mut s, -1.0);
        Ok(s)
    };
    let offset = |s: &[f64], h: f64| -> Vec<f64> {
        x.iter().zip(s).map(|(xi, si)| xi + h * si).collect()
    };

    let s1 = slope(x)?;
    let s2 = slope(&offset(&s1, t / 2.0))?;
    let s3 = slope(&offset(&s2, t / 2.0))?;
    let s4 = slope(&offset(&s3, t))?;
    Ok((0..x.len())
        .map(|i| x[i] + t / 6.0 * (s1[i] + 2.0 * s2[i] + 2.0 * s3[i] + s4[i]))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RkOrder {
    Coarse,
    Fourth,
}

/// A Runge-Kutta step followed by soft thresholding at `λt`.
pub fn sparse_rk_update(
    obj: &SpcaObjective<'_>,
    x: &[f64],
    t: f64,
    lambda: f64,
    order: RkOrder,
) -> Result<Vec<f64>> {
    let stepped = match order {
        RkOrder::Coarse => rk_coarse_step(obj, x, t)?,
        RkOrder::Fourth => rk4_step(obj, x, t)?,
    };
    Ok(soft_threshold(&stepped, lambda * t))
}
