//! Experiment harness: seeded repetitions over a noise grid, each with a
//! uniform train/test split, bag noise, optional feature pipeline and one
//! classification pass per method.

mod config;
mod emit;

use std::collections::BTreeMap;
use std::time::Instant;

use rand::seq::SliceRandom;
use rayon::prelude::*;

pub use config::{BagSource, ExperimentConfig, Method, Source, DEFAULT_REPETITIONS, FULL_REPETITIONS};
pub use emit::{emit, format_sig, write_predictions, write_results, write_summary};

use crate::baselines::{aknn_batch, fixed_k_batch};
use crate::dataset::{PartialDataset, PartialExample};
use crate::error::Error;
use crate::knn::NeighborIndex;
use crate::labels::{Bag, Label};
use crate::plaknn::decide_batch;
use crate::preprocess::FittedPipeline;
use crate::synth::{analytic_scenario, make_bags, remove_truth_noise, rng_stream, SynthBagConfig};

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("config error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(#[from] Error),
    #[error("cannot write output: {0}")]
    Output(#[from] std::io::Error),
}

impl BenchError {
    /// Process exit status for the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Config(_) => 2,
            BenchError::Data(_) => 3,
            BenchError::Output(_) => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub method: Method,
    pub noise: f64,
    pub repetition: usize,
    pub seed: u64,
    pub n_train: usize,
    pub error_rate: f64,
    /// Mean neighbors consumed per query, PL A-kNN only.
    pub mean_iterations: Option<f64>,
    pub wall_time_ms: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub method: Method,
    pub noise: f64,
    pub mean_error: f64,
    /// Sample standard deviation; 0 for a single repetition.
    pub std_error: f64,
    pub n_reps: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PredictionRow {
    pub method: Method,
    pub noise: f64,
    pub repetition: usize,
    /// Position of the example in the source data.
    pub example: usize,
    pub truth: Label,
    pub prediction: Label,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Record wall-clock times; otherwise they are written as 0 so output
    /// bytes only depend on the config.
    pub timing: bool,
    pub predictions: bool,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunOutput {
    pub rows: Vec<ResultRow>,
    pub summary: Vec<SummaryRow>,
    pub predictions: Vec<PredictionRow>,
}

/// Source data for one repetition. Deterministic in `seed`.
fn source_data(cfg: &ExperimentConfig, base: Option<&PartialDataset>, seed: u64) -> Result<PartialDataset, BenchError> {
    match &cfg.source {
        Source::Dataset { .. } => Ok(base.expect("dataset loaded").clone()),
        Source::Scenario { name, n_samples } if name == "clusters" => {
            let (xs, ys) = cfg.clusters.sample(*n_samples, &mut rng_stream(seed, 0));
            let examples = xs
                .into_iter()
                .zip(ys)
                .map(|(x, y)| PartialExample { x, bag: Bag::singleton(y), truth: Some(y) })
                .collect();
            Ok(PartialDataset::new(examples, cfg.clusters.label_space()?)?)
        }
        Source::Scenario { name, n_samples } => {
            let scenario = analytic_scenario(name, &cfg.scenario).map_err(|e| BenchError::Config(e.to_string()))?;
            Ok(scenario.sample_dataset(*n_samples, &mut rng_stream(seed, 0))?)
        }
    }
}

fn apply_noise(cfg: &ExperimentConfig, data: &PartialDataset, noise: f64, seed: u64) -> Result<PartialDataset, Error> {
    match cfg.bag_source {
        BagSource::Synth => {
            let synth = SynthBagConfig { noise_nu: noise, seed, ..cfg.synth.clone() };
            make_bags(&data.features(), &data.truths()?, data.label_space(), &synth)
        }
        BagSource::Native if noise > 0.0 => remove_truth_noise(data, noise, seed),
        BagSource::Native => Ok(data.clone()),
    }
}

/// The synthetic dataset `bench synth` writes: all samples of repetition 0
/// with the first noise level applied.
pub fn generate(cfg: &ExperimentConfig) -> Result<PartialDataset, BenchError> {
    let base = load_base(cfg)?;
    let data = source_data(cfg, base.as_ref(), cfg.seed)?;
    Ok(apply_noise(cfg, &data, cfg.noise[0], cfg.seed)?)
}

fn load_base(cfg: &ExperimentConfig) -> Result<Option<PartialDataset>, BenchError> {
    match &cfg.source {
        Source::Dataset { path, labels } => {
            let space = labels.map(crate::LabelSpace::new).transpose().map_err(|e| BenchError::Config(e.to_string()))?;
            Ok(Some(PartialDataset::from_csv_path(path, space)?))
        }
        Source::Scenario { .. } => Ok(None),
    }
}

struct JobOutput {
    rows: Vec<ResultRow>,
    predictions: Vec<PredictionRow>,
}

fn run_job(
    cfg: &ExperimentConfig,
    base: Option<&PartialDataset>,
    noise: f64,
    repetition: usize,
    opts: RunOptions,
) -> Result<JobOutput, BenchError> {
    let seed = cfg.seed.wrapping_add(repetition as u64);
    let data = source_data(cfg, base, seed)?;
    let n = data.len();
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 examples to split, got {n}")).into());
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng_stream(seed, 4));
    let n_train = ((cfg.train_fraction * n as f64).round() as usize).clamp(1, n - 1);
    let mut train_idx = order[..n_train].to_vec();
    let mut test_idx = order[n_train..].to_vec();
    train_idx.sort_unstable();
    test_idx.sort_unstable();

    let test = data.select(&test_idx)?;
    let truths = test.truths()?;
    let mut train = apply_noise(cfg, &data.select(&train_idx)?, noise, seed)?;
    let mut queries = test.features();
    if let Some(p) = &cfg.pipeline {
        let fitted = FittedPipeline::fit(&train.features(), p)?;
        queries = fitted.transform(&queries)?;
        train = train.with_features(fitted.train_output().to_vec())?;
    }
    let index = NeighborIndex::build(&train.features())?;

    let mut rows = Vec::with_capacity(cfg.methods.len());
    let mut predictions = Vec::new();
    for &method in &cfg.methods {
        let start = Instant::now();
        let (labels, mean_iterations) = match method {
            Method::Plaknn => {
                let d = decide_batch(&train, &index, &queries, &cfg.plaknn)?;
                let iters = d.iter().map(|d| d.iterations as f64).sum::<f64>() / d.len() as f64;
                (d.into_iter().map(|d| d.label).collect::<Vec<_>>(), Some(iters))
            }
            Method::Aknn => (aknn_batch(&train, &index, &queries, &cfg.plaknn)?.into_iter().map(|o| o.label).collect(), None),
            Method::FixedK => (fixed_k_batch(&train, &index, &queries, cfg.k)?, None),
        };
        let elapsed = start.elapsed().as_secs_f64() * 1e3;
        let wrong = labels.iter().zip(&truths).filter(|(p, t)| p != t).count();
        rows.push(ResultRow {
            method,
            noise,
            repetition,
            seed,
            n_train,
            error_rate: wrong as f64 / truths.len() as f64,
            mean_iterations,
            wall_time_ms: if opts.timing { elapsed } else { 0.0 },
        });
        if opts.predictions {
            predictions.extend(test_idx.iter().zip(&truths).zip(&labels).map(|((&example, &truth), &prediction)| {
                PredictionRow { method, noise, repetition, example, truth, prediction }
            }));
        }
    }
    Ok(JobOutput { rows, predictions })
}

pub fn run(cfg: &ExperimentConfig, opts: RunOptions) -> Result<RunOutput, BenchError> {
    cfg.validate()?;
    let base = load_base(cfg)?;
    let jobs: Vec<(f64, usize)> =
        cfg.noise.iter().flat_map(|&nu| (0..cfg.repetitions).map(move |rep| (nu, rep))).collect();
    let outputs = jobs
        .par_iter()
        .map(|&(nu, rep)| run_job(cfg, base.as_ref(), nu, rep, opts))
        .collect::<Result<Vec<_>, _>>()?;
    let mut rows = Vec::new();
    let mut predictions = Vec::new();
    for out in outputs {
        rows.extend(out.rows);
        predictions.extend(out.predictions);
    }
    rows.sort_by(|a, b| {
        a.method.cmp(&b.method).then(a.noise.total_cmp(&b.noise)).then(a.repetition.cmp(&b.repetition))
    });
    predictions.sort_by(|a, b| {
        a.method
            .cmp(&b.method)
            .then(a.noise.total_cmp(&b.noise))
            .then(a.repetition.cmp(&b.repetition))
            .then(a.example.cmp(&b.example))
    });
    let summary = summarize(&rows);
    Ok(RunOutput { rows, summary, predictions })
}

/// Mean and sample standard deviation of the error per (method, noise).
pub fn summarize(rows: &[ResultRow]) -> Vec<SummaryRow> {
    let mut groups: BTreeMap<(Method, u64), Vec<f64>> = BTreeMap::new();
    for r in rows {
        // Nonnegative floats order like their bit patterns.
        groups.entry((r.method, r.noise.to_bits())).or_default().push(r.error_rate);
    }
    groups
        .into_iter()
        .map(|((method, bits), errs)| {
            let n = errs.len();
            let mean = errs.iter().sum::<f64>() / n as f64;
            let std = if n > 1 {
                (errs.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
            } else {
                0.0
            };
            SummaryRow { method, noise: f64::from_bits(bits), mean_error: mean, std_error: std, n_reps: n }
        })
        .collect()
}
