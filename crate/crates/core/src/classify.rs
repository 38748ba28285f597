//! k-nearest-neighbour and RBF kernel ridge regression classifiers.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::{self, cholesky_solve};
use crate::{Error, Matrix, Result};

pub const DEFAULT_K: usize = 1;
pub const DEFAULT_ALPHA: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KnnConfig {
    pub k: usize,
}

impl Default for KnnConfig {
    fn default() -> Self {
        KnnConfig { k: DEFAULT_K }
    }
}

fn check_same_dim(a: &Matrix, b: &Matrix, what: &str) -> Result<()> {
    if a.cols() != b.cols() {
        return Err(Error::invalid(format!(
            "{what}: feature dimensions differ ({} vs {})",
            a.cols(),
            b.cols()
        )));
    }
    Ok(())
}

/// Majority vote over the `k` nearest training rows (Euclidean).
///
/// Neighbours are ranked by distance, then by label, so the selected set does
/// not depend on the order of training rows. A tied vote goes to the label
/// with the smallest summed neighbour distance, then to the lowest label id.
pub fn knn_predict(
    train_x: &Matrix,
    train_y: &[usize],
    test_x: &Matrix,
    cfg: &KnnConfig,
) -> Result<Vec<usize>> {
    check_same_dim(train_x, test_x, "knn")?;
    if train_x.rows() != train_y.len() {
        return Err(Error::invalid(format!(
            "{} training rows but {} labels",
            train_x.rows(),
            train_y.len()
        )));
    }
    let n = train_x.rows();
    if cfg.k == 0 || cfg.k > n {
        return Err(Error::invalid(format!(
            "k must be in [1, {n}], got {}",
            cfg.k
        )));
    }
    let label_span = train_y.iter().max().map_or(0, |m| m + 1);

    let mut neighbours: Vec<(f64, usize)> = Vec::with_capacity(n);
    let mut votes = vec![0usize; label_span];
    let mut dist_sum = vec![0.0f64; label_span];
    let mut out = Vec::with_capacity(test_x.rows());
    for q in test_x.row_iter() {
        neighbours.clear();
        neighbours.extend(
            train_x
                .row_iter()
                .zip(train_y)
                .map(|(r, &y)| (linalg::squared_distance(r, q), y)),
        );
        neighbours.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

        votes.iter_mut().for_each(|v| *v = 0);
        dist_sum.iter_mut().for_each(|v| *v = 0.0);
        for &(d2, y) in &neighbours[..cfg.k] {
            votes[y] += 1;
            dist_sum[y] += libm::sqrt(d2);
        }
        let best = (0..label_span)
            .filter(|&l| votes[l] > 0)
            .min_by(|&a, &b| {
                votes[b]
                    .cmp(&votes[a])
                    .then(dist_sum[a].total_cmp(&dist_sum[b]))
                    .then(a.cmp(&b))
            })
            .expect("k >= 1 guarantees a vote");
        out.push(best);
    }
    Ok(out)
}

/// `K[i][j] = exp(-γ ‖X_i - Y_j‖²)`
pub fn rbf_kernel(x: &Matrix, y: &Matrix, gamma: f64) -> Result<Matrix> {
    check_same_dim(x, y, "rbf kernel")?;
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::invalid(format!("gamma must be finite and > 0, got {gamma}")));
    }
    let mut k = Matrix::zeros(x.rows(), y.rows());
    for (i, xi) in x.row_iter().enumerate() {
        for (j, yj) in y.row_iter().enumerate() {
            k[(i, j)] = libm::exp(-gamma * linalg::squared_distance(xi, yj));
        }
    }
    Ok(k)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrrConfig {
    /// RBF width; `None` uses [`default_gamma`] on the training features.
    pub gamma: Option<f64>,
    pub alpha: f64,
}

impl Default for KrrConfig {
    fn default() -> Self {
        KrrConfig {
            gamma: None,
            alpha: DEFAULT_ALPHA,
        }
    }
}

impl KrrConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(g) = self.gamma {
            if !(g > 0.0) || !g.is_finite() {
                return Err(Error::invalid(format!("gamma must be finite and > 0, got {g}")));
            }
        }
        if !(self.alpha > 0.0) || !self.alpha.is_finite() {
            return Err(Error::invalid(format!(
                "alpha must be finite and > 0, got {}",
                self.alpha
            )));
        }
        Ok(())
    }
}

/// `1 / (d · median feature variance)`, falling back to `1 / d` when the
/// median variance is zero.
pub fn default_gamma(train_x: &Matrix) -> f64 {
    let (n, d) = train_x.shape();
    if n == 0 || d == 0 {
        return 1.0;
    }
    let mean = crate::dataset::column_means(train_x);
    let mut var = vec![0.0; d];
    for r in train_x.row_iter() {
        for ((v, x), m) in var.iter_mut().zip(r).zip(&mean) {
            *v += (x - m) * (x - m);
        }
    }
    linalg::scale(&mut var, 1.0 / n as f64);
    var.sort_unstable_by(f64::total_cmp);
    let median = if d % 2 == 1 {
        var[d / 2]
    } else {
        0.5 * (var[d / 2 - 1] + var[d / 2])
    };
    if median > 0.0 {
        1.0 / (d as f64 * median)
    } else {
        1.0 / d as f64
    }
}

/// Dual coefficients of a one-hot kernel ridge regression.
#[derive(Debug, Clone, PartialEq)]
pub struct KrrModel {
    train_x: Matrix,
    coef: Matrix,
    gamma: f64,
    alpha: f64,
}

impl KrrModel {
    /// `n × class_count` dual coefficients.
    pub fn coefficients(&self) -> &Matrix {
        &self.coef
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn class_count(&self) -> usize {
        self.coef.cols()
    }

    /// `rbf_kernel(test, train) · C`, one row of class scores per sample.
    pub fn scores(&self, test_x: &Matrix) -> Result<Matrix> {
        check_same_dim(&self.train_x, test_x, "krr predict")?;
        rbf_kernel(test_x, &self.train_x, self.gamma)?.matmul(&self.coef)
    }
}

pub fn one_hot(labels: &[usize], class_count: usize) -> Result<Matrix> {
    let mut y = Matrix::zeros(labels.len(), class_count);
    for (i, &l) in labels.iter().enumerate() {
        if l >= class_count {
            return Err(Error::invalid(format!(
                "label {l} at row {i} outside [0, {class_count})"
            )));
        }
        y[(i, l)] = 1.0;
    }
    Ok(y)
}

/// Solves `(K + αI) C = Y` with `Y` the one-hot label matrix.
pub fn krr_fit(
    train_x: &Matrix,
    train_y: &[usize],
    class_count: usize,
    cfg: &KrrConfig,
) -> Result<KrrModel> {
    cfg.validate()?;
    let n = train_x.rows();
    if n == 0 {
        return Err(Error::invalid("kernel ridge regression needs at least one sample"));
    }
    if n != train_y.len() {
        return Err(Error::invalid(format!(
            "{n} training rows but {} labels",
            train_y.len()
        )));
    }
    let gamma = cfg.gamma.unwrap_or_else(|| default_gamma(train_x));
    let mut k = rbf_kernel(train_x, train_x, gamma)?;
    for i in 0..n {
        k[(i, i)] += cfg.alpha;
    }
    let y = one_hot(train_y, class_count)?;
    let coef = cholesky_solve(&k, &y)?;
    Ok(KrrModel {
        train_x: train_x.clone(),
        coef,
        gamma,
        alpha: cfg.alpha,
    })
}

/// Relative gap under which two class scores count as tied.
const SCORE_TIE_RTOL: f64 = 1e-12;

/// Per-row argmax of the class scores; ties go to the lowest class id.
///
/// Scores within `1e-12` of the row's largest magnitude are tied, so
/// symmetric configurations are not decided by solver round-off.
pub fn krr_predict(model: &KrrModel, test_x: &Matrix) -> Result<Vec<usize>> {
    let scores = model.scores(test_x)?;
    Ok(scores.row_iter().map(argmax).collect())
}

fn argmax(row: &[f64]) -> usize {
    let top = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let scale = row.iter().fold(0.0, |m: f64, s| m.max(s.abs()));
    let cutoff = top - SCORE_TIE_RTOL * scale;
    row.iter().position(|&s| s >= cutoff).unwrap_or(0)
}

/// Fraction of positions where `pred` equals `truth`.
pub fn accuracy(pred: &[usize], truth: &[usize]) -> Result<f64> {
    if pred.is_empty() {
        return Err(Error::invalid("accuracy of an empty prediction set"));
    }
    if pred.len() != truth.len() {
        return Err(Error::invalid(format!(
            "{} predictions against {} labels",
            pred.len(),
            truth.len()
        )));
    }
    let hits = pred.iter().zip(truth).filter(|(a, b)| a == b).count();
    Ok(hits as f64 / pred.len() as f64)
}
