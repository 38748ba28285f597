use alloc::format;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::step::{ista_step, sparse_rk_update, RkOrder, SpcaObjective};
use super::{fit_pca, ComponentBasis, LoadingVector, Method, SolveTrace, SolverConfig, SolverParams};
use crate::time::{DefaultStopwatch, Stopwatch};
use crate::{linalg, Error, Matrix, Result};

/// Seeded starting point: a Gaussian draw rescaled to unit length, which is
/// uniform on the sphere.
pub fn initial_loading(p: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let mut x: Vec<f64> = (0..p).map(|_| StandardNormal.sample(&mut rng)).collect();
        if linalg::normalize(&mut x) > 0.0 || p == 0 {
            return x;
        }
    }
}

/// Extracts one sparse loading vector of `d` with the configured update.
pub fn solve_component(d: &Matrix, cfg: &SolverConfig) -> Result<(LoadingVector, SolveTrace)> {
    solve_component_timed::<DefaultStopwatch>(d, cfg)
}

pub fn solve_component_timed<W: Stopwatch>(
    d: &Matrix,
    cfg: &SolverConfig,
) -> Result<(LoadingVector, SolveTrace)> {
    let params = cfg.resolve(d)?;
    let clock = W::start();
    let (x, mut trace) = iterate(d, cfg, params)?;
    trace.wall_seconds = clock.elapsed_seconds();
    Ok((x, trace))
}

fn iterate(d: &Matrix, cfg: &SolverConfig, params: SolverParams) -> Result<(LoadingVector, SolveTrace)> {
    let order = match cfg.method {
        Method::Ista => None,
        Method::RkCoarse => Some(RkOrder::Coarse),
        Method::Rk4 => Some(RkOrder::Fourth),
        Method::PcaBaseline => {
            return Err(Error::invalid(
                "the PCA baseline has no iterative solve; use fit_pca",
            ))
        }
    };
    let SolverParams { step_t, lambda } = params;
    let obj = SpcaObjective::new(d);
    let mut x = initial_loading(d.cols(), cfg.seed);
    let mut delta = f64::INFINITY;
    let mut iterations = 0;

    while iterations < cfg.max_iters {
        let mut next = match order {
            None => ista_step(&obj, &x, step_t, lambda)?,
            Some(o) => sparse_rk_update(&obj, &x, step_t, lambda, o)?,
        };
        iterations += 1;
        if next.iter().all(|v| *v == 0.0) {
            return Err(Error::OverShrinkage {
                threshold: params.threshold(),
                iteration: iterations,
                component: None,
            });
        }
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical(format!(
                "iterate became non-finite at iteration {iterations} (step t = {step_t})"
            )));
        }
        if cfg.normalize_each_iter {
            linalg::normalize(&mut next);
        }
        delta = libm::sqrt(linalg::squared_distance(&next, &x));
        x = next;
        if delta < cfg.tol {
            break;
        }
    }

    let trace = SolveTrace {
        iterations_used: iterations,
        gradient_evals: obj.gradient_evals(),
        final_delta: delta,
        wall_seconds: 0.0,
    };
    Ok((LoadingVector::new(x), trace))
}

/// Projection deflation `D (I - v vᵀ)`: every row `r` becomes `r - (r·v) v`.
pub fn deflate(d: &Matrix, v: &[f64]) -> Result<Matrix> {
    if v.len() != d.cols() {
        return Err(Error::invalid(format!(
            "deflation vector has length {}, matrix has {} columns",
            v.len(),
            d.cols()
        )));
    }
    let n = linalg::norm2(v);
    if (n - 1.0).abs() > 1e-8 {
        return Err(Error::invalid(format!(
            "deflation needs a unit vector, got norm {n}"
        )));
    }
    let mut out = d.clone();
    for i in 0..out.rows() {
        let row = out.row_mut(i);
        let c = linalg::dot(row, v);
        linalg::axpy(-c, v, row);
    }
    Ok(out)
}

/// Extracts `k` sparse components by repeated solve and projection deflation.
///
/// `t` and `λ` are resolved once against `d`, so every component shares the
/// same step and threshold. Component `i` starts from seed `cfg.seed + i`.
/// The basis stores unit-norm loadings; the trace sums over components and
/// its `wall_seconds` covers the whole extraction loop.
pub fn fit_sparse_pca(d: &Matrix, k: usize, cfg: &SolverConfig) -> Result<(ComponentBasis, SolveTrace)> {
    fit_sparse_pca_timed::<DefaultStopwatch>(d, k, cfg)
}

pub fn fit_sparse_pca_timed<W: Stopwatch>(
    d: &Matrix,
    k: usize,
    cfg: &SolverConfig,
) -> Result<(ComponentBasis, SolveTrace)> {
    check_component_count(d, k)?;
    let params = cfg.resolve(d)?;
    let clock = W::start();

    let mut current = d.clone();
    let mut columns = Vec::with_capacity(k);
    let mut total = SolveTrace::default();
    for i in 0..k {
        let per = SolverConfig {
            seed: cfg.seed.wrapping_add(i as u64),
            ..*cfg
        };
        let (v, trace) = iterate(&current, &per, params).map_err(|e| e.with_component(i))?;
        let mut unit = v.into_values();
        linalg::normalize(&mut unit);
        if i + 1 < k {
            current = deflate(&current, &unit)?;
        }
        columns.push(LoadingVector::new(unit));
        total.iterations_used += trace.iterations_used;
        total.gradient_evals += trace.gradient_evals;
        total.final_delta = trace.final_delta;
    }
    total.wall_seconds = clock.elapsed_seconds();
    Ok((ComponentBasis::new(columns)?, total))
}

/// Fits `k` components with whichever method `cfg` names, dense PCA included.
pub fn fit(d: &Matrix, k: usize, cfg: &SolverConfig) -> Result<(ComponentBasis, SolveTrace)> {
    fit_timed::<DefaultStopwatch>(d, k, cfg)
}

pub fn fit_timed<W: Stopwatch>(
    d: &Matrix,
    k: usize,
    cfg: &SolverConfig,
) -> Result<(ComponentBasis, SolveTrace)> {
    match cfg.method {
        Method::PcaBaseline => {
            let clock = W::start();
            let basis = fit_pca(d, k)?;
            let trace = SolveTrace {
                wall_seconds: clock.elapsed_seconds(),
                ..SolveTrace::default()
            };
            Ok((basis, trace))
        }
        _ => fit_sparse_pca_timed::<W>(d, k, cfg),
    }
}

pub(super) fn check_component_count(d: &Matrix, k: usize) -> Result<()> {
    if k == 0 || k > d.cols() {
        return Err(Error::invalid(format!(
            "number of components must be in [1, {}], got {k}",
            d.cols()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spca::soft_threshold;
    use crate::time::NoClock;
    use alloc::vec;

    fn seeded(rows: usize, cols: usize, seed: u64) -> Matrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Matrix::from_fn(rows, cols, |_, _| StandardNormal.sample(&mut rng))
    }

    #[test]
    fn initial_loading_is_unit_and_seeded() {
        let a = initial_loading(17, 4);
        assert!((linalg::norm2(&a) - 1.0).abs() < 1e-14);
        assert_eq!(a, initial_loading(17, 4));
        assert_ne!(a, initial_loading(17, 5));
    }

    #[test]
    fn single_iteration_is_one_update_of_x0() {
        let d = seeded(6, 4, 1);
        for method in [Method::Ista, Method::RkCoarse, Method::Rk4] {
            let cfg = SolverConfig::new(method)
                .with_step(0.05)
                .with_lambda(0.0)
                .with_max_iters(1)
                .with_normalize(false);
            let (x, trace) = solve_component_timed::<NoClock>(&d, &cfg).unwrap();
            assert_eq!(trace.iterations_used, 1);
            assert_eq!(trace.gradient_evals, method.gradient_evals_per_iter());
            let obj = SpcaObjective::new(&d);
            let x0 = initial_loading(4, 0);
            let expected = match method {
                Method::Ista => ista_step(&obj, &x0, 0.05, 0.0).unwrap(),
                Method::RkCoarse => sparse_rk_update(&obj, &x0, 0.05, 0.0, RkOrder::Coarse).unwrap(),
                _ => sparse_rk_update(&obj, &x0, 0.05, 0.0, RkOrder::Fourth).unwrap(),
            };
            assert_eq!(x.values(), expected.as_slice());
        }
    }

    #[test]
    fn full_shrinkage_fails_on_first_iteration() {
        let d = seeded(5, 3, 2);
        let t = 0.1;
        let x0 = initial_loading(3, 0);
        let moved = ista_step(&SpcaObjective::new(&d), &x0, t, 0.0).unwrap();
        let inf = moved.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
        let mut lambda = inf / t;
        while lambda * t < inf {
            lambda = lambda.next_up();
        }
        let cfg = SolverConfig::new(Method::Ista).with_step(t).with_lambda(lambda);
        assert_eq!(soft_threshold(&moved, inf), vec![0.0; 3]);
        match solve_component(&d, &cfg) {
            Err(Error::OverShrinkage { iteration, component, .. }) => {
                assert_eq!(iteration, 1);
                assert_eq!(component, None);
            }
            other => panic!("expected over-shrinkage, got {other:?}"),
        }
        match fit_sparse_pca(&d, 2, &cfg) {
            Err(Error::OverShrinkage { component, .. }) => assert_eq!(component, Some(0)),
            other => panic!("expected over-shrinkage, got {other:?}"),
        }
    }

    #[test]
    fn pca_method_rejected_by_iterative_solver() {
        let d = seeded(4, 3, 3);
        assert!(solve_component(&d, &SolverConfig::new(Method::PcaBaseline)).is_err());
        let (basis, trace) = fit(&d, 2, &SolverConfig::new(Method::PcaBaseline)).unwrap();
        assert_eq!(basis.len(), 2);
        assert_eq!(trace.gradient_evals, 0);
    }

    #[test]
    fn deflate_examples() {
        let d = Matrix::identity(2);
        let out = deflate(&d, &[1.0, 0.0]).unwrap();
        assert_eq!(out, Matrix::from_rows(&[[0.0, 0.0], [0.0, 1.0]]).unwrap());
        assert!(matches!(deflate(&d, &[1.0, 1.0]), Err(Error::InvalidInput(_))));
        assert!(deflate(&d, &[1.0]).is_err());

        let d = seeded(7, 5, 9);
        let mut v = initial_loading(5, 1);
        linalg::normalize(&mut v);
        let once = deflate(&d, &v).unwrap();
        let twice = deflate(&once, &v).unwrap();
        assert!(d.matvec(&v).unwrap().iter().any(|x| x.abs() > 1e-3));
        assert!(linalg::norm2(&once.matvec(&v).unwrap()) <= 1e-10 * d.frobenius_norm());
        for (a, b) in once.as_slice().iter().zip(twice.as_slice()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn d_one_fit_matches_single_solve() {
        let d = seeded(9, 6, 5);
        let cfg = SolverConfig::new(Method::Rk4).with_seed(3).with_lambda(0.5);
        let (v, trace) = solve_component(&d, &cfg).unwrap();
        let (basis, ftrace) = fit_sparse_pca(&d, 1, &cfg).unwrap();
        let mut unit = v.values().to_vec();
        linalg::normalize(&mut unit);
        assert_eq!(basis.columns()[0].values(), unit.as_slice());
        assert_eq!(ftrace.iterations_used, trace.iterations_used);
        assert_eq!(ftrace.gradient_evals, trace.gradient_evals);
    }

    #[test]
    fn component_count_bounds() {
        let d = seeded(4, 3, 0);
        let cfg = SolverConfig::new(Method::Ista);
        assert!(fit_sparse_pca(&d, 0, &cfg).is_err());
        assert!(fit_sparse_pca(&d, 4, &cfg).is_err());
    }
}
