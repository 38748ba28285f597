//! Sparse principal component analysis driven by ℓ₁-proximal iterations.
//!
//! The variance objective `g(x) = -xᵀDᵀDx` is minimized under an ℓ₁ penalty
//! with one of three update schemes, each followed by soft thresholding:
//!
//! * proximal gradient (ISTA), `x ← prox((I + 2tDᵀD) x)`;
//! * a two-stage coarse Runge-Kutta step on the gradient flow `ẋ = -∇g(x)`;
//! * the classical fourth-order Runge-Kutta step on the same flow.
//!
//! Multiple components are extracted by projection deflation. A dense PCA
//! baseline, a k-nearest-neighbour classifier and an RBF kernel ridge
//! regression classifier complete the face-recognition pipeline.
//!
//! The crate is `no_std` (it needs `alloc`). With the default `std` feature
//! enabled, solver traces record wall-clock time through [`time::StdStopwatch`].
#![cfg_attr(not(feature = "std"), no_std)]
// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod classify;
pub mod dataset;
mod error;
pub mod linalg;
mod matrix;
pub mod spca;
pub mod time;

pub use error::{Error, Result};
pub use matrix::Matrix;
