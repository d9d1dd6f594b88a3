//! Adaptive label elimination over a growing neighborhood.
//!
//! For a query `x` the classifier walks its neighbors in order. After the
//! `k`-th neighbor it holds, for every label `y`, the count `tau_y` of
//! neighbor bags containing `y`. With `m` the largest count among surviving
//! labels, every survivor with `(m - tau_y) / k >= threshold(k)` is dropped.
//! The walk stops once a single label survives or after `max_iter` steps.
//! If several labels survive, the one whose scaled margin
//! `sqrt(k) * (threshold(k) - (tau_y - m2) / k)` came lowest at any step wins,
//! where `m2` is the second largest surviving count at that step.

use rayon::prelude::*;

use crate::dataset::PartialDataset;
use crate::error::{Error, Result};
use crate::knn::NeighborIndex;
use crate::labels::{Bag, Label};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Threshold driven by `ln n + ln(c / delta)`.
    Pointwise,
    /// Threshold driven by `d0 ln n + ln(c / delta)`, uniform over queries.
    Uniform,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlaknnConfig {
    pub c1: f64,
    pub delta: f64,
    /// Iteration cap `T`; clamped to the training size at classification.
    pub max_iter: usize,
    pub mode: Mode,
    /// Complexity term for [`Mode::Uniform`]; `None` means `dim + 1`.
    pub d0: Option<usize>,
}

impl Default for PlaknnConfig {
    fn default() -> Self {
        Self { c1: 0.5, delta: 0.1, max_iter: 400, mode: Mode::Pointwise, d0: None }
    }
}

impl PlaknnConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.c1 > 0.0 && self.c1.is_finite()) {
            return Err(Error::InvalidParameter(format!("c1 must be positive, got {}", self.c1)));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidParameter(format!("delta must lie in (0,1), got {}", self.delta)));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter("max_iter must be at least 1".into()));
        }
        if self.d0 == Some(0) {
            return Err(Error::InvalidParameter("d0 must be positive".into()));
        }
        Ok(())
    }

    /// Resolves the `d0` used in uniform mode for features of dimension `dim`.
    pub fn complexity(&self, dim: usize) -> usize {
        self.d0.unwrap_or(dim + 1)
    }
}

/// `c1 * sqrt((w ln n + ln(c / delta)) / k)` with `w = 1` in pointwise mode
/// and `w = d0` in uniform mode. Uniform mode needs an explicit `d0`.
pub fn threshold(n: usize, k: usize, delta: f64, c: usize, config: &PlaknnConfig) -> Result<f64> {
    if n == 0 || k == 0 {
        return Err(Error::InvalidParameter("threshold needs n >= 1 and k >= 1".into()));
    }
    if c < 2 {
        return Err(Error::InvalidParameter("threshold needs c >= 2".into()));
    }
    let cfg = PlaknnConfig { delta, ..config.clone() };
    cfg.validate()?;
    let weight = match cfg.mode {
        Mode::Pointwise => 1,
        Mode::Uniform => cfg
            .d0
            .ok_or_else(|| Error::InvalidParameter("uniform mode needs d0".into()))?,
    };
    Ok(Threshold::new(n, c, cfg.c1, delta, weight).at(k))
}

/// The threshold schedule for a fixed training size: `scale / sqrt(k)`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Threshold {
    scale: f64,
}

impl Threshold {
    pub(crate) fn new(n: usize, c: usize, c1: f64, delta: f64, weight: usize) -> Self {
        let log_term = weight as f64 * (n as f64).ln() + (c as f64 / delta).ln();
        Self { scale: c1 * log_term.sqrt() }
    }

    pub(crate) fn for_dataset(train: &PartialDataset, config: &PlaknnConfig) -> Self {
        let weight = match config.mode {
            Mode::Pointwise => 1,
            Mode::Uniform => config.complexity(train.dim()),
        };
        Self::new(train.len(), train.label_space().len(), config.c1, config.delta, weight)
    }

    pub(crate) fn at(self, k: usize) -> f64 {
        self.scale / (k as f64).sqrt()
    }
}

/// One pass of the elimination loop.
#[derive(Clone, Debug, PartialEq)]
pub struct Iteration {
    pub k: usize,
    /// Training index of the `k`-th neighbor.
    pub neighbor: usize,
    pub threshold: f64,
    /// `tau_y` for every label after adding this neighbor's bag.
    pub counts: Vec<u32>,
    /// Survivors entering the iteration.
    pub candidates: Bag,
    /// Disambiguation margin for every candidate, ascending label order.
    pub margins: Vec<(Label, f64)>,
    /// Survivors leaving the iteration.
    pub survivors: Bag,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// A single label survived.
    Eliminated,
    /// The cap was reached and the margin criterion picked the label.
    Disambiguated,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EliminationTrace {
    pub iterations: Vec<Iteration>,
    pub survivors: Bag,
    pub label: Label,
    pub outcome: Outcome,
    /// `T` after clamping to the training size.
    pub max_iter: usize,
}

/// Label plus the number of neighbors consumed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Decision {
    pub label: Label,
    pub iterations: usize,
}

fn check_inputs(train: &PartialDataset, index: &NeighborIndex, config: &PlaknnConfig) -> Result<usize> {
    config.validate()?;
    if train.is_empty() {
        return Err(Error::Empty("training set"));
    }
    if index.len() != train.len() || index.dim() != train.dim() {
        return Err(Error::InvalidParameter("index was not built over this training set".into()));
    }
    Ok(config.max_iter.min(train.len()))
}

fn warn_clamp(config: &PlaknnConfig, n: usize) {
    if config.max_iter > n {
        log::warn!("max_iter {} exceeds training size {n}; clamping", config.max_iter);
    }
}

pub fn classify(
    train: &PartialDataset,
    index: &NeighborIndex,
    x: &[f64],
    config: &PlaknnConfig,
) -> Result<(Label, EliminationTrace)> {
    let max_iter = check_inputs(train, index, config)?;
    warn_clamp(config, train.len());
    let mut iterations = Vec::new();
    let (decision, survivors, outcome) = run(train, index, x, config, max_iter, Some(&mut iterations))?;
    let trace = EliminationTrace { iterations, survivors, label: decision.label, outcome, max_iter };
    Ok((decision.label, trace))
}

/// Classifies every query; results match [`classify`] element by element.
pub fn classify_batch(
    train: &PartialDataset,
    index: &NeighborIndex,
    queries: &[Vec<f64>],
    config: &PlaknnConfig,
) -> Result<Vec<Label>> {
    Ok(decide_batch(train, index, queries, config)?.into_iter().map(|d| d.label).collect())
}

/// Like [`classify_batch`] but also reports how many neighbors each query used.
pub fn decide_batch(
    train: &PartialDataset,
    index: &NeighborIndex,
    queries: &[Vec<f64>],
    config: &PlaknnConfig,
) -> Result<Vec<Decision>> {
    let max_iter = check_inputs(train, index, config)?;
    warn_clamp(config, train.len());
    queries
        .par_iter()
        .map(|q| run(train, index, q, config, max_iter, None).map(|r| r.0))
        .collect()
}

fn run(
    train: &PartialDataset,
    index: &NeighborIndex,
    x: &[f64],
    config: &PlaknnConfig,
    max_iter: usize,
    mut trace: Option<&mut Vec<Iteration>>,
) -> Result<(Decision, Bag, Outcome)> {
    let space = train.label_space();
    let c = space.len();
    let thr = Threshold::for_dataset(train, config);
    let examples = train.examples();

    let mut survivors = space.full_bag();
    let mut counts = vec![0u32; c];
    // Best (margin, k) seen so far for each label.
    let mut best: Vec<(f64, usize)> = vec![(f64::INFINITY, usize::MAX); c];
    let mut k = 0;
    let mut stream = index.stream(x)?;

    while survivors.len() > 1 && k < max_iter {
        k += 1;
        let (neighbor, _) = stream.next().expect("max_iter is clamped to n");
        let delta_k = thr.at(k);
        for y in examples[neighbor].bag.labels() {
            counts[y - 1] += 1;
        }
        let (m1, m2) = top_two(survivors.labels().map(|y| counts[y - 1]));
        let candidates = survivors;
        let kf = k as f64;
        let mut margins = Vec::new();
        for y in candidates.labels() {
            let tau = counts[y - 1] as f64;
            let margin = kf.sqrt() * (delta_k - (tau - m2 as f64) / kf);
            if margin < best[y - 1].0 {
                best[y - 1] = (margin, k);
            }
            if trace.is_some() {
                margins.push((y, margin));
            }
            if (m1 as f64 - tau) / kf >= delta_k {
                survivors = survivors.without(y).expect("the leading label always survives");
            }
        }
        if let Some(t) = trace.as_deref_mut() {
            t.push(Iteration {
                k,
                neighbor,
                threshold: delta_k,
                counts: counts.clone(),
                candidates,
                margins,
                survivors,
            });
        }
    }

    if survivors.len() == 1 {
        let label = survivors.first();
        return Ok((Decision { label, iterations: k }, survivors, Outcome::Eliminated));
    }
    let label = survivors
        .labels()
        .min_by(|&a, &b| {
            let (ma, ka) = best[a - 1];
            let (mb, kb) = best[b - 1];
            ma.total_cmp(&mb).then(ka.cmp(&kb)).then(a.cmp(&b))
        })
        .expect("survivors are nonempty");
    Ok((Decision { label, iterations: k }, survivors, Outcome::Disambiguated))
}

/// Largest and second largest values (with multiplicity).
fn top_two<I: Iterator<Item = u32>>(values: I) -> (u32, u32) {
    let mut first = 0;
    let mut second = 0;
    for v in values {
        if v > first {
            second = first;
            first = v;
        } else if v > second {
            second = v;
        }
    }
    (first, second)
}
