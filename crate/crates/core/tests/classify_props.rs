mod common;

use common::seeded_matrix;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spca_core::classify::{
    accuracy, krr_fit, krr_predict, knn_predict, rbf_kernel, KnnConfig, KrrConfig,
};
use spca_core::Matrix;

fn labels(n: usize, classes: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut y: Vec<usize> = (0..n).map(|i| i % classes).collect();
    y.shuffle(&mut rng);
    y
}

#[test]
fn one_nn_classifies_its_own_training_set() {
    let x = seeded_matrix(50, 6, 1);
    let y = labels(50, 5, 2);
    let pred = knn_predict(&x, &y, &x, &KnnConfig { k: 1 }).unwrap();
    assert_eq!(accuracy(&pred, &y).unwrap(), 1.0);
}

#[test]
fn krr_interpolates_training_labels() {
    let x = seeded_matrix(50, 6, 3);
    let y = labels(50, 4, 4);
    let model = krr_fit(&x, &y, 4, &KrrConfig { gamma: None, alpha: 1e-10 }).unwrap();
    let pred = krr_predict(&model, &x).unwrap();
    assert_eq!(accuracy(&pred, &y).unwrap(), 1.0);
}

#[test]
fn krr_interpolation_two_class_ten_points() {
    let x = seeded_matrix(10, 2, 5);
    let y = labels(10, 2, 6);
    let model = krr_fit(&x, &y, 2, &KrrConfig { gamma: None, alpha: 1e-10 }).unwrap();
    assert_eq!(krr_predict(&model, &x).unwrap(), y);
}

fn permute(x: &Matrix, y: &[usize], seed: u64) -> (Matrix, Vec<usize>) {
    let mut idx: Vec<usize> = (0..y.len()).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let rows: Vec<Vec<f64>> = idx.iter().map(|&i| x.row(i).to_vec()).collect();
    (
        Matrix::from_rows(&rows).unwrap(),
        idx.iter().map(|&i| y[i]).collect(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn knn_ignores_training_order(seed in 0u64..10_000, k in 1usize..8) {
        // integer grid coordinates make exact distance ties common
        let raw = seeded_matrix(30, 3, seed);
        let x = Matrix::from_fn(30, 3, |i, j| raw[(i, j)].round());
        let y = labels(30, 4, seed + 1);
        let q = Matrix::from_fn(10, 3, |i, j| seeded_matrix(10, 3, seed + 2)[(i, j)].round());
        let base = knn_predict(&x, &y, &q, &KnnConfig { k }).unwrap();
        for s in 0..3 {
            let (px, py) = permute(&x, &y, seed * 7 + s);
            prop_assert_eq!(&knn_predict(&px, &py, &q, &KnnConfig { k }).unwrap(), &base);
        }
    }

    #[test]
    fn rbf_gram_is_symmetric_with_unit_diagonal(seed in 0u64..10_000, gamma in 0.01f64..5.0) {
        let x = seeded_matrix(12, 4, seed);
        let k = rbf_kernel(&x, &x, gamma).unwrap();
        for i in 0..12 {
            prop_assert_eq!(k[(i, i)], 1.0);
            for j in 0..12 {
                prop_assert_eq!(k[(i, j)], k[(j, i)]);
                prop_assert!(k[(i, j)] > 0.0 && k[(i, j)] <= 1.0);
            }
        }
    }

    #[test]
    fn krr_decision_survives_class_relabeling(seed in 0u64..10_000) {
        // reversing class ids permutes the score columns; decisions follow
        let x = seeded_matrix(20, 3, seed);
        let y = labels(20, 3, seed + 1);
        let cfg = KrrConfig { gamma: Some(0.5), alpha: 1e-2 };
        let q = seeded_matrix(8, 3, seed + 2);
        let model = krr_fit(&x, &y, 3, &cfg).unwrap();
        let flipped: Vec<usize> = y.iter().map(|l| 2 - l).collect();
        let fmodel = krr_fit(&x, &flipped, 3, &cfg).unwrap();
        let s = model.scores(&q).unwrap();
        let fs = fmodel.scores(&q).unwrap();
        let a = krr_predict(&model, &q).unwrap();
        let b = krr_predict(&fmodel, &q).unwrap();
        for i in 0..8 {
            let row = s.row(i);
            let mut sorted = row.to_vec();
            sorted.sort_by(|p, q| q.total_cmp(p));
            // skip rows whose top two scores are within the tie tolerance
            if sorted[0] - sorted[1] > 1e-9 {
                prop_assert_eq!(a[i], 2 - b[i]);
            }
            for (c, v) in row.iter().enumerate() {
                prop_assert!((v - fs.row(i)[2 - c]).abs() < 1e-9);
            }
        }
    }
}
