//! The `spca` command line: `synth`, `run` and `sweep`.
//!
//! Exit codes: 0 on success, 2 for usage, validation and I/O errors, 3 when a
//! solve fails numerically (over-shrinkage or non-finite iterates).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use spca_core::classify::{KnnConfig, KrrConfig, DEFAULT_ALPHA, DEFAULT_K};
use spca_core::dataset::{synth_faces, SynthParams};
use spca_core::spca::{Method, SolverConfig, DEFAULT_MAX_ITERS, DEFAULT_TOL};

use crate::data::{load_csv, write_csv};
use crate::pipeline::{run_experiment, run_sweep, BenchReport, Classifier, ExperimentSpec, SweepOptions};
use crate::report::{emit_table, emit_timing_table, Format};
use crate::Error;

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "spca",
    version,
    about = "Sparse PCA (ISTA, coarse RK, RK4) with kNN / kernel ridge regression benchmarks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a seeded synthetic train/test pair as label-first CSV files.
    Synth(SynthArgs),
    /// Run one reduction + classifier experiment and print its report row.
    Run(RunArgs),
    /// Run the method x d x classifier grid and print the full report.
    Sweep(SweepArgs),
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be >= 1".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 15, value_parser = positive)]
    pub classes: usize,
    #[arg(long, default_value_t = 8, value_parser = positive)]
    pub train_per_class: usize,
    #[arg(long, default_value_t = 3, value_parser = positive)]
    pub test_per_class: usize,
    /// Feature dimension p (1024 = a flattened 32x32 image).
    #[arg(long, default_value_t = 1024, value_parser = positive)]
    pub dim: usize,
    /// Standard deviation of the Gaussian noise around each class mean.
    #[arg(long, default_value_t = 0.5)]
    pub noise: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory for train.csv and test.csv.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Pca,
    Ista,
    /// Coarse (two-stage) Runge-Kutta.
    #[value(alias = "coarse")]
    Rk2,
    /// Fourth-order Runge-Kutta.
    Rk4,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Pca => Method::PcaBaseline,
            MethodArg::Ista => Method::Ista,
            MethodArg::Rk2 => Method::RkCoarse,
            MethodArg::Rk4 => Method::Rk4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClassifierArg {
    Knn,
    Krr,
}

impl From<ClassifierArg> for Classifier {
    fn from(c: ClassifierArg) -> Classifier {
        match c {
            ClassifierArg::Knn => Classifier::Knn,
            ClassifierArg::Krr => Classifier::Krr,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Markdown,
    Csv,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Markdown => Format::Markdown,
            FormatArg::Csv => Format::Csv,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    /// l1 penalty lambda; the soft threshold is lambda*t. Required for sparse methods, ignored for pca.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Step size t [default: 1/(2*sigma_max(D)^2), from 50 power iterations].
    #[arg(long)]
    pub step: Option<f64>,
    /// Stop once ||x_{k+1} - x_k||_2 < tol.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_ITERS, value_parser = positive)]
    pub max_iters: usize,
    /// Seed for the initial loading vectors.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Do not rescale the iterate to unit norm after each update.
    #[arg(long)]
    pub no_normalize: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ClassifierArgs {
    /// Neighbours for kNN.
    #[arg(long, default_value_t = DEFAULT_K, value_parser = positive)]
    pub k: usize,
    /// RBF width for KRR [default: 1/(d * median feature variance) of the reduced training set].
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Ridge regularizer for KRR.
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    pub alpha: f64,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long)]
    pub test: PathBuf,
    #[arg(long, value_enum)]
    pub method: MethodArg,
    /// Number of components.
    #[arg(long)]
    pub d: usize,
    #[arg(long, value_enum, default_value_t = ClassifierArg::Knn)]
    pub classifier: ClassifierArg,
    #[arg(long, value_enum, default_value_t = FormatArg::Markdown)]
    pub format: FormatArg,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub classify: ClassifierArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long)]
    pub test: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "20,30,40,50,60")]
    pub d_list: Vec<usize>,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "pca,ista,rk2,rk4")]
    pub methods: Vec<MethodArg>,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "knn,krr")]
    pub classifiers: Vec<ClassifierArg>,
    /// Run fits one at a time on one thread and also print a fit-timing table.
    #[arg(long)]
    pub sequential_timing: bool,
    /// Worker threads for independent fits.
    #[arg(long, default_value_t = 1, value_parser = positive)]
    pub jobs: usize,
    /// Also write the report as CSV to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Markdown)]
    pub format: FormatArg,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub classify: ClassifierArgs,
}

fn base_spec(solver: &SolverArgs, classify: &ClassifierArgs) -> ExperimentSpec {
    let mut cfg = SolverConfig::new(Method::Ista)
        .with_tol(solver.tol)
        .with_max_iters(solver.max_iters)
        .with_seed(solver.seed)
        .with_normalize(!solver.no_normalize);
    cfg.step_t = solver.step;
    cfg.lambda = solver.lambda;
    ExperimentSpec {
        reduction: Method::Ista,
        d: 1,
        classifier: Classifier::Knn,
        solver: cfg,
        knn: KnnConfig { k: classify.k },
        krr: KrrConfig {
            gamma: classify.gamma,
            alpha: classify.alpha,
        },
    }
}

fn check_lambda(methods: &[Method], lambda: Option<f64>) -> Result<(), Error> {
    let sparse = methods.iter().any(|m| m.is_sparse());
    if sparse && lambda.is_none() {
        return Err(Error::Usage(
            "--lambda is required for sparse methods (ista, rk2, rk4)".into(),
        ));
    }
    if !sparse && lambda.is_some() {
        eprintln!("warning: --lambda is ignored for --method pca");
    }
    Ok(())
}

fn ensure_trailing_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

fn cmd_synth(args: &SynthArgs) -> Result<(), Error> {
    let params = SynthParams {
        classes: args.classes,
        per_class_train: args.train_per_class,
        per_class_test: args.test_per_class,
        dim: args.dim,
        noise: args.noise,
        seed: args.seed,
    };
    let (train, test) = synth_faces(&params)?;
    std::fs::create_dir_all(&args.out).map_err(|source| Error::Io {
        path: args.out.clone(),
        source,
    })?;
    for (name, ds) in [("train.csv", &train), ("test.csv", &test)] {
        let path = args.out.join(name);
        write_csv(ds, &path)?;
        println!("wrote {} rows x {} features to {}", ds.len(), ds.dim(), path.display());
    }
    Ok(())
}

fn cmd_run(args: &RunArgs) -> Result<(), Error> {
    let method = Method::from(args.method);
    check_lambda(&[method], args.solver.lambda)?;
    let spec = ExperimentSpec {
        reduction: method,
        d: args.d,
        classifier: args.classifier.into(),
        ..base_spec(&args.solver, &args.classify)
    };
    spec.validate()?;
    let train = load_csv(&args.train)?;
    let test = load_csv(&args.test)?;
    let row = run_experiment(&train, &test, &spec)?;
    let report = BenchReport { rows: vec![row] };
    print!("{}", emit_table(&report, args.format.into())?);
    Ok(())
}

fn write_text(path: &Path, text: &str) -> Result<(), Error> {
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), Error> {
    let methods: Vec<Method> = args.methods.iter().copied().map(Method::from).collect();
    let classifiers: Vec<Classifier> = args.classifiers.iter().copied().map(Classifier::from).collect();
    check_lambda(&methods, args.solver.lambda)?;
    if args.d_list.contains(&0) {
        return Err(Error::Usage("--d-list values must be >= 1".into()));
    }
    let base = base_spec(&args.solver, &args.classify);
    base.validate()?;
    let train = load_csv(&args.train)?;
    let test = load_csv(&args.test)?;
    let opts = SweepOptions {
        jobs: if args.sequential_timing { 1 } else { args.jobs },
        sequential_timing: args.sequential_timing,
    };
    let report = match run_sweep(&train, &test, &base, &args.d_list, &methods, &classifiers, &opts) {
        Ok(r) => r,
        Err(e) => {
            if !e.partial.is_empty() {
                eprintln!("partial report before the failure:");
                eprint!("{}", emit_table(&e.partial, Format::Markdown)?);
            }
            return Err(e.source);
        }
    };
    print!("{}", emit_table(&report, args.format.into())?);
    if args.sequential_timing {
        if let Ok(timing) = emit_timing_table(&report, args.format.into()) {
            println!();
            println!("Sparse PCA fit time (seconds, sequential):");
            print!("{timing}");
        }
    }
    if let Some(out) = &args.out {
        write_text(out, &ensure_trailing_newline(emit_table(&report, Format::Csv)?))?;
    }
    Ok(())
}

pub fn exit_code(err: &Error) -> u8 {
    if err.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_USAGE
    }
}

pub fn execute(cli: &Cli) -> Result<(), Error> {
    match &cli.command {
        Command::Synth(a) => cmd_synth(a),
        Command::Run(a) => cmd_run(a),
        Command::Sweep(a) => cmd_sweep(a),
    }
}

/// Parses `std::env::args`, runs the command and maps errors to exit codes.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
