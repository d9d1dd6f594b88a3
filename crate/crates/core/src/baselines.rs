//! Comparison classifiers over the same neighbor ordering.
//!
//! * fixed-k: the label contained in the most of the `k` nearest bags;
//! * adaptive kNN with a frequency bar: grow `k` until some label's bag
//!   frequency exceeds `1/c` by the elimination threshold.
//!
//! All ties go to the smallest label.

use rayon::prelude::*;

use crate::dataset::PartialDataset;
use crate::error::{Error, Result};
use crate::knn::NeighborIndex;
use crate::labels::Label;
use crate::plaknn::{PlaknnConfig, Threshold};

fn check_index(train: &PartialDataset, index: &NeighborIndex) -> Result<()> {
    if train.is_empty() {
        return Err(Error::Empty("training set"));
    }
    if index.len() != train.len() || index.dim() != train.dim() {
        return Err(Error::InvalidParameter("index was not built over this training set".into()));
    }
    Ok(())
}

fn most_frequent(counts: &[u32]) -> Label {
    let mut best = 0;
    for (i, &v) in counts.iter().enumerate() {
        if v > counts[best] {
            best = i;
        }
    }
    best + 1
}

pub fn fixed_k_classify(train: &PartialDataset, index: &NeighborIndex, x: &[f64], k: usize) -> Result<Label> {
    check_index(train, index)?;
    if k == 0 || k > train.len() {
        return Err(Error::InvalidParameter(format!("k must lie in 1..={}, got {k}", train.len())));
    }
    let mut counts = vec![0u32; train.label_space().len()];
    for (i, _) in index.stream(x)?.take(k) {
        for y in train.examples()[i].bag.labels() {
            counts[y - 1] += 1;
        }
    }
    Ok(most_frequent(&counts))
}

pub fn fixed_k_batch(
    train: &PartialDataset,
    index: &NeighborIndex,
    queries: &[Vec<f64>],
    k: usize,
) -> Result<Vec<Label>> {
    queries.par_iter().map(|q| fixed_k_classify(train, index, q, k)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AknnOutcome {
    pub label: Label,
    /// Neighborhood size at which the decision was taken.
    pub k: usize,
    /// `false` when no label cleared the bar and the fallback was used.
    pub qualified: bool,
}

pub fn aknn_classify(train: &PartialDataset, index: &NeighborIndex, x: &[f64], config: &PlaknnConfig) -> Result<Label> {
    aknn_decide(train, index, x, config).map(|o| o.label)
}

pub fn aknn_decide(
    train: &PartialDataset,
    index: &NeighborIndex,
    x: &[f64],
    config: &PlaknnConfig,
) -> Result<AknnOutcome> {
    config.validate()?;
    check_index(train, index)?;
    let max_iter = config.max_iter.min(train.len());
    let c = train.label_space().len();
    let bar = 1.0 / c as f64;
    let thr = Threshold::for_dataset(train, config);
    let mut counts = vec![0u32; c];
    let mut stream = index.stream(x)?;
    for k in 1..=max_iter {
        let (i, _) = stream.next().expect("max_iter is clamped to n");
        for y in train.examples()[i].bag.labels() {
            counts[y - 1] += 1;
        }
        let delta_k = thr.at(k);
        let kf = k as f64;
        if let Some(y) = (0..c).find(|&y| counts[y] as f64 / kf - bar >= delta_k) {
            return Ok(AknnOutcome { label: y + 1, k, qualified: true });
        }
    }
    Ok(AknnOutcome { label: most_frequent(&counts), k: max_iter, qualified: false })
}

pub fn aknn_batch(
    train: &PartialDataset,
    index: &NeighborIndex,
    queries: &[Vec<f64>],
    config: &PlaknnConfig,
) -> Result<Vec<AknnOutcome>> {
    queries.par_iter().map(|q| aknn_decide(train, index, q, config)).collect()
}
