//! Reduce → classify → score experiments and the method × d × classifier sweep.

use std::fmt;

use rayon::prelude::*;
use spca_core::classify::{
    accuracy, knn_predict, krr_fit, krr_predict, KnnConfig, KrrConfig,
};
use spca_core::dataset::{apply_centering, center, LabeledDataset};
use spca_core::spca::{fit, project, ComponentBasis, Method, SolveTrace, SolverConfig};

use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Classifier {
    Knn,
    Krr,
}

impl Classifier {
    pub fn name(self) -> &'static str {
        match self {
            Classifier::Knn => "k nearest neighbor",
            Classifier::Krr => "kernel ridge regression",
        }
    }
}

/// One cell of the experimental grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentSpec {
    pub reduction: Method,
    pub d: usize,
    pub classifier: Classifier,
    /// `solver.method` is ignored in favour of `reduction`.
    pub solver: SolverConfig,
    pub knn: KnnConfig,
    pub krr: KrrConfig,
}

impl ExperimentSpec {
    pub fn new(reduction: Method, d: usize, classifier: Classifier) -> Self {
        ExperimentSpec {
            reduction,
            d,
            classifier,
            solver: SolverConfig::new(reduction),
            knn: KnnConfig::default(),
            krr: KrrConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.d == 0 {
            return Err(Error::Usage("d must be >= 1".into()));
        }
        if self.knn.k == 0 {
            return Err(Error::Usage("k must be >= 1".into()));
        }
        self.solver.validate()?;
        self.krr.validate()?;
        Ok(())
    }

    fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            method: self.reduction,
            ..self.solver
        }
    }
}

impl fmt::Display for ExperimentSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} (d={}) + {}",
            self.reduction.name(),
            self.d,
            self.classifier.name()
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub reduction: Method,
    pub d: usize,
    pub classifier: Classifier,
    pub accuracy: f64,
    /// Wall time of the reduction fit only.
    pub spca_seconds: f64,
    pub gradient_evals: usize,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BenchReport {
    pub rows: Vec<ReportRow>,
}

impl BenchReport {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Centered train/test pair; the test set reuses the training mean.
struct Prepared {
    train: LabeledDataset,
    test: LabeledDataset,
}

fn prepare(train: &LabeledDataset, test: &LabeledDataset) -> Result<Prepared, Error> {
    if train.dim() != test.dim() {
        return Err(Error::Usage(format!(
            "train has {} features, test has {}",
            train.dim(),
            test.dim()
        )));
    }
    let (train_c, info) = center(train);
    let test_c = apply_centering(test, &info)?;
    Ok(Prepared {
        train: train_c,
        test: test_c,
    })
}

struct Fitted {
    basis: ComponentBasis,
    trace: SolveTrace,
}

fn fit_reduction(data: &Prepared, spec: &ExperimentSpec) -> Result<Fitted, Error> {
    let (basis, trace) = fit(data.train.features(), spec.d, &spec.solver_config()).map_err(
        |source| Error::Experiment {
            context: spec.to_string(),
            source,
        },
    )?;
    Ok(Fitted { basis, trace })
}

fn score(data: &Prepared, fitted: &Fitted, spec: &ExperimentSpec) -> Result<ReportRow, Error> {
    let annotate = |source| Error::Experiment {
        context: spec.to_string(),
        source,
    };
    let train_z = project(data.train.features(), &fitted.basis).map_err(annotate)?;
    let test_z = project(data.test.features(), &fitted.basis).map_err(annotate)?;
    let pred = match spec.classifier {
        Classifier::Knn => {
            knn_predict(&train_z, data.train.labels(), &test_z, &spec.knn).map_err(annotate)?
        }
        Classifier::Krr => {
            let model = krr_fit(
                &train_z,
                data.train.labels(),
                data.train.class_count(),
                &spec.krr,
            )
            .map_err(annotate)?;
            krr_predict(&model, &test_z).map_err(annotate)?
        }
    };
    Ok(ReportRow {
        reduction: spec.reduction,
        d: spec.d,
        classifier: spec.classifier,
        accuracy: accuracy(&pred, data.test.labels()).map_err(annotate)?,
        spca_seconds: fitted.trace.wall_seconds,
        gradient_evals: fitted.trace.gradient_evals,
        iterations: fitted.trace.iterations_used,
    })
}

/// Centers, fits the reduction on training features (timed), projects both
/// sets, classifies the test set and scores it.
pub fn run_experiment(
    train: &LabeledDataset,
    test: &LabeledDataset,
    spec: &ExperimentSpec,
) -> Result<ReportRow, Error> {
    spec.validate()?;
    let data = prepare(train, test)?;
    let fitted = fit_reduction(&data, spec)?;
    score(&data, &fitted, spec)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepOptions {
    /// Worker threads for independent fits.
    pub jobs: usize,
    /// Run every fit on the calling thread, one after another, so timings
    /// are comparable.
    pub sequential_timing: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            jobs: 1,
            sequential_timing: false,
        }
    }
}

/// A failed sweep: the rows finished before the failing cell, in grid order.
#[derive(Debug, thiserror::Error)]
#[error("sweep aborted after {} rows: {source}", partial.len())]
pub struct SweepError {
    pub partial: BenchReport,
    #[source]
    pub source: Error,
}

/// Runs the cartesian product `reductions × d_values × classifiers`, in that
/// nesting order. Each `(reduction, d)` fit is computed once and shared by
/// every classifier, so those rows report the same timing and counts.
pub fn run_sweep(
    train: &LabeledDataset,
    test: &LabeledDataset,
    base: &ExperimentSpec,
    d_values: &[usize],
    reductions: &[Method],
    classifiers: &[Classifier],
    opts: &SweepOptions,
) -> Result<BenchReport, SweepError> {
    let fail = |source| SweepError {
        partial: BenchReport::default(),
        source,
    };
    if d_values.is_empty() || reductions.is_empty() || classifiers.is_empty() {
        return Err(fail(Error::Usage(
            "sweep needs at least one d value, method and classifier".into(),
        )));
    }
    if opts.jobs == 0 {
        return Err(fail(Error::Usage("jobs must be >= 1".into())));
    }
    let data = prepare(train, test).map_err(fail)?;

    let cells: Vec<(Method, usize)> = reductions
        .iter()
        .flat_map(|&r| d_values.iter().map(move |&d| (r, d)))
        .collect();
    let run_cell = |&(reduction, d): &(Method, usize)| -> Vec<Result<ReportRow, Error>> {
        let specs: Vec<ExperimentSpec> = classifiers
            .iter()
            .map(|&classifier| ExperimentSpec {
                reduction,
                d,
                classifier,
                ..*base
            })
            .collect();
        if let Err(e) = specs[0].validate() {
            return vec![Err(e)];
        }
        match fit_reduction(&data, &specs[0]) {
            Ok(fitted) => specs.iter().map(|s| score(&data, &fitted, s)).collect(),
            Err(e) => vec![Err(e)],
        }
    };

    let results: Vec<Vec<Result<ReportRow, Error>>> = if opts.sequential_timing || opts.jobs == 1 {
        // stop at the first failing cell
        let mut out = Vec::with_capacity(cells.len());
        for cell in &cells {
            let rows = run_cell(cell);
            let failed = rows.iter().any(Result::is_err);
            out.push(rows);
            if failed {
                break;
            }
        }
        out
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.jobs)
            .build()
            .map_err(|e| fail(Error::Usage(format!("thread pool: {e}"))))?;
        pool.install(|| cells.par_iter().map(run_cell).collect())
    };

    let mut report = BenchReport::default();
    for row in results.into_iter().flatten() {
        match row {
            Ok(r) => report.rows.push(r),
            Err(source) => {
                return Err(SweepError {
                    partial: report,
                    source,
                })
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use spca_core::dataset::{synth_faces, SynthParams};

    fn small() -> (LabeledDataset, LabeledDataset) {
        synth_faces(&SynthParams {
            classes: 4,
            per_class_train: 5,
            per_class_test: 2,
            dim: 24,
            noise: 0.2,
            seed: 1,
        })
        .unwrap()
    }

    #[test]
    fn single_cell_sweep() {
        let (train, test) = small();
        let base = ExperimentSpec::new(Method::Rk4, 3, Classifier::Knn);
        let report = run_sweep(
            &train,
            &test,
            &base,
            &[3],
            &[Method::Rk4],
            &[Classifier::Knn],
            &SweepOptions::default(),
        )
        .unwrap();
        assert_eq!(report.len(), 1);
        let direct = run_experiment(&train, &test, &base).unwrap();
        assert_eq!(report.rows[0].accuracy, direct.accuracy);
        assert_eq!(report.rows[0].gradient_evals, direct.gradient_evals);
    }

    #[test]
    fn sweep_order_is_reduction_then_d_then_classifier() {
        let (train, test) = small();
        let base = ExperimentSpec::new(Method::Ista, 2, Classifier::Knn);
        let report = run_sweep(
            &train,
            &test,
            &base,
            &[2, 4],
            &[Method::PcaBaseline, Method::RkCoarse],
            &[Classifier::Knn, Classifier::Krr],
            &SweepOptions { jobs: 3, sequential_timing: false },
        )
        .unwrap();
        let keys: Vec<_> = report
            .rows
            .iter()
            .map(|r| (r.reduction, r.d, r.classifier))
            .collect();
        use Classifier::*;
        use Method::*;
        assert_eq!(
            keys,
            vec![
                (PcaBaseline, 2, Knn),
                (PcaBaseline, 2, Krr),
                (PcaBaseline, 4, Knn),
                (PcaBaseline, 4, Krr),
                (RkCoarse, 2, Knn),
                (RkCoarse, 2, Krr),
                (RkCoarse, 4, Knn),
                (RkCoarse, 4, Krr),
            ]
        );
    }

    #[test]
    fn failure_aborts_with_partial_report() {
        let (train, test) = small();
        let mut base = ExperimentSpec::new(Method::Ista, 2, Classifier::Knn);
        base.solver = base.solver.with_step(0.01).with_lambda(1e6);
        let err = run_sweep(
            &train,
            &test,
            &base,
            &[2],
            &[Method::PcaBaseline, Method::Ista, Method::Rk4],
            &[Classifier::Knn],
            &SweepOptions::default(),
        )
        .unwrap_err();
        assert_eq!(err.partial.len(), 1);
        assert_eq!(err.partial.rows[0].reduction, Method::PcaBaseline);
        assert!(err.source.is_numerical());
        assert!(err.source.to_string().contains("ISTA sparse PCA (d=2)"));
    }

    #[test]
    fn rejects_empty_grids_and_mismatched_data() {
        let (train, test) = small();
        let base = ExperimentSpec::new(Method::Ista, 2, Classifier::Knn);
        let opts = SweepOptions::default();
        assert!(run_sweep(&train, &test, &base, &[], &[Method::Ista], &[Classifier::Knn], &opts).is_err());
        let (other, _) = synth_faces(&SynthParams { dim: 5, ..SynthParams::face_benchmark(0.1, 0) }).unwrap();
        assert!(run_experiment(&train, &other, &base).is_err());
        let bad = ExperimentSpec { d: 0, ..base };
        assert!(matches!(run_experiment(&train, &test, &bad), Err(Error::Usage(_))));
    }
}
