//! Labeled feature matrices, centering and a seeded synthetic face-like
//! dataset generator.

use alloc::format;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::{Error, Matrix, Result};

/// Samples as rows of `features`, with contiguous 0-based class ids.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    features: Matrix,
    labels: Vec<usize>,
    class_count: usize,
}

impl LabeledDataset {
    pub fn new(features: Matrix, labels: Vec<usize>, class_count: usize) -> Result<Self> {
        if features.rows() == 0 || features.cols() == 0 {
            return Err(Error::invalid(format!(
                "dataset needs n > 0 and p > 0, got {}x{}",
                features.rows(),
                features.cols()
            )));
        }
        if features.rows() != labels.len() {
            return Err(Error::invalid(format!(
                "{} feature rows but {} labels",
                features.rows(),
                labels.len()
            )));
        }
        if let Some((i, &l)) = labels.iter().enumerate().find(|(_, &l)| l >= class_count) {
            return Err(Error::invalid(format!(
                "label {l} at row {i} outside [0, {class_count})"
            )));
        }
        Ok(LabeledDataset {
            features,
            labels,
            class_count,
        })
    }

    /// Builds a dataset from arbitrary integer labels, remapping them to
    /// contiguous ids in order of first appearance.
    pub fn from_raw_labels(features: Matrix, raw: &[i64]) -> Result<Self> {
        let mut seen: Vec<i64> = Vec::new();
        let labels = raw
            .iter()
            .map(|r| match seen.iter().position(|s| s == r) {
                Some(id) => id,
                None => {
                    seen.push(*r);
                    seen.len() - 1
                }
            })
            .collect();
        LabeledDataset::new(features, labels, seen.len())
    }

    pub fn features(&self) -> &Matrix {
        &self.features
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.features.cols()
    }

    /// Same labels, new features. The row count must not change.
    pub fn with_features(&self, features: Matrix) -> Result<Self> {
        LabeledDataset::new(features, self.labels.clone(), self.class_count)
    }
}

/// Per-feature means subtracted by [`center`].
#[derive(Debug, Clone, PartialEq)]
pub struct CenteringInfo {
    pub mean: Vec<f64>,
}

/// Concatenates the rows of an `h × w` image into a vector of length `h·w`.
pub fn flatten_image(img: &Matrix) -> Result<Vec<f64>> {
    if img.rows() == 0 || img.cols() == 0 {
        return Err(Error::invalid("cannot flatten an empty image"));
    }
    Ok(img.as_slice().to_vec())
}

/// Inverse of [`flatten_image`].
pub fn unflatten_image(v: &[f64], height: usize, width: usize) -> Result<Matrix> {
    Matrix::from_vec(height, width, v.to_vec())
}

pub fn column_means(m: &Matrix) -> Vec<f64> {
    let n = m.rows() as f64;
    let mut mean = alloc::vec![0.0; m.cols()];
    for r in m.row_iter() {
        crate::linalg::axpy(1.0, r, &mut mean);
    }
    crate::linalg::scale(&mut mean, 1.0 / n);
    mean
}

/// Subtracts the column means from every row.
pub fn center(ds: &LabeledDataset) -> (LabeledDataset, CenteringInfo) {
    let info = CenteringInfo {
        mean: column_means(ds.features()),
    };
    let centered = apply_centering(ds, &info).expect("mean has the dataset's own dimension");
    (centered, info)
}

/// Subtracts a previously computed mean, e.g. the training mean from test data.
pub fn apply_centering(ds: &LabeledDataset, info: &CenteringInfo) -> Result<LabeledDataset> {
    if info.mean.len() != ds.dim() {
        return Err(Error::invalid(format!(
            "centering mean has length {}, dataset has {} features",
            info.mean.len(),
            ds.dim()
        )));
    }
    let mut f = ds.features().clone();
    for i in 0..f.rows() {
        crate::linalg::axpy(-1.0, &info.mean, f.row_mut(i));
    }
    ds.with_features(f)
}

/// Parameters of [`synth_faces`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthParams {
    pub classes: usize,
    pub per_class_train: usize,
    pub per_class_test: usize,
    pub dim: usize,
    pub noise: f64,
    pub seed: u64,
}

impl SynthParams {
    /// 15 classes, 8 training and 3 test samples each, 32×32 features.
    pub fn face_benchmark(noise: f64, seed: u64) -> Self {
        SynthParams {
            classes: 15,
            per_class_train: 8,
            per_class_test: 3,
            dim: 1024,
            noise,
            seed,
        }
    }
}

/// Generates isotropic Gaussian clusters around per-class means drawn
/// uniformly from `[0, 1)^p`.
///
/// All class means are drawn first, then the training samples (class-major),
/// then the test samples, from one ChaCha8 stream seeded with `seed`.
pub fn synth_faces(params: &SynthParams) -> Result<(LabeledDataset, LabeledDataset)> {
    let SynthParams {
        classes,
        per_class_train,
        per_class_test,
        dim,
        noise,
        seed,
    } = *params;
    if classes == 0 || per_class_train == 0 || per_class_test == 0 || dim == 0 {
        return Err(Error::invalid(format!(
            "synthetic dataset counts must be >= 1 (classes {classes}, train {per_class_train}, test {per_class_test}, dim {dim})"
        )));
    }
    if !(noise >= 0.0) || !noise.is_finite() {
        return Err(Error::invalid(format!("noise must be finite and >= 0, got {noise}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let means: Vec<Vec<f64>> = (0..classes)
        .map(|_| (0..dim).map(|_| rng.random::<f64>()).collect())
        .collect();
    let gauss = Normal::new(0.0, noise).map_err(|e| Error::invalid(format!("{e}")))?;

    let mut draw = |per_class: usize| -> Result<LabeledDataset> {
        let mut data = Vec::with_capacity(classes * per_class * dim);
        let mut labels = Vec::with_capacity(classes * per_class);
        for (c, mean) in means.iter().enumerate() {
            for _ in 0..per_class {
                if noise == 0.0 {
                    data.extend_from_slice(mean);
                } else {
                    data.extend(mean.iter().map(|m| m + gauss.sample(&mut rng)));
                }
                labels.push(c);
            }
        }
        LabeledDataset::new(Matrix::from_vec(labels.len(), dim, data)?, labels, classes)
    };
    let train = draw(per_class_train)?;
    let test = draw(per_class_test)?;
    Ok((train, test))
}
