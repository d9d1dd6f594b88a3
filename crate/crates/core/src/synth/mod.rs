//! Synthetic partial-label generation.
//!
//! [`make_bags`] turns a supervised sample into a partially labeled one with a
//! bag process that varies across k-means clusters, optionally corrupting the
//! anchor label first. [`remove_truth_noise`] injects noise into datasets that
//! already carry bags. [`scenario`] holds sampleable distributions with
//! grid-integrated oracles.

mod kmeans;
pub mod scenario;

pub use kmeans::kmeans;
pub use scenario::{analytic_scenario, AnalyticScenario, ClusterScenario, OracleReport, Sample, ScenarioParams};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::{PartialDataset, PartialExample};
use crate::error::{Error, Result};
use crate::labels::{Bag, Label, LabelSpace};

const KMEANS_RESTARTS: usize = 10;

/// Independent RNG stream `stream` derived from `seed`.
pub fn rng_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynthBagConfig {
    pub n_clusters: usize,
    /// Inclusion probabilities are drawn from `Uniform[0, alpha_max]`.
    pub alpha_max: f64,
    /// Probability of replacing the anchor label by a uniform draw over all labels.
    pub noise_nu: f64,
    pub seed: u64,
}

impl Default for SynthBagConfig {
    fn default() -> Self {
        Self { n_clusters: 5, alpha_max: 0.8, noise_nu: 0.0, seed: 0 }
    }
}

impl SynthBagConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_clusters == 0 {
            return Err(Error::InvalidParameter("n_clusters must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.alpha_max) {
            return Err(Error::InvalidParameter(format!("alpha_max must lie in [0,1], got {}", self.alpha_max)));
        }
        if !(0.0..=1.0).contains(&self.noise_nu) {
            return Err(Error::InvalidParameter(format!("noise_nu must lie in [0,1], got {}", self.noise_nu)));
        }
        Ok(())
    }
}

/// `alpha[label - 1][cluster]`: probability that each non-anchor label joins
/// the bag of an example in `cluster` whose anchor is `label`.
pub type AlphaTable = Vec<Vec<f64>>;

/// Draws bags for every example given its cluster and the alpha table.
///
/// Per example: one uniform decides corruption (probability `noise_nu`), a
/// uniform label replaces the anchor when corrupted, then every other label
/// joins independently with the anchor's cluster probability.
pub fn generate_bags<R: Rng>(
    truths: &[Label],
    clusters: &[usize],
    alphas: &AlphaTable,
    noise_nu: f64,
    space: LabelSpace,
    rng: &mut R,
) -> Result<Vec<Bag>> {
    if truths.len() != clusters.len() {
        return Err(Error::DimensionMismatch { expected: truths.len(), got: clusters.len() });
    }
    truths
        .iter()
        .zip(clusters)
        .map(|(&y, &cluster)| {
            space.check(y)?;
            let corrupt = rng.random::<f64>() < noise_nu;
            let anchor = if corrupt { rng.random_range(1..=space.len()) } else { y };
            let alpha = alphas
                .get(anchor - 1)
                .and_then(|row| row.get(cluster))
                .copied()
                .ok_or_else(|| Error::InvalidParameter(format!("no alpha for label {anchor}, cluster {cluster}")))?;
            let mut bag = Bag::singleton(anchor);
            for other in space.labels().filter(|&o| o != anchor) {
                if rng.random::<f64>() < alpha {
                    bag = bag.with(other);
                }
            }
            Ok(bag)
        })
        .collect()
}

/// Builds a partially labeled dataset from features and true labels.
/// The original truths are kept in the `truth` field.
pub fn make_bags(
    features: &[Vec<f64>],
    truths: &[Label],
    space: LabelSpace,
    config: &SynthBagConfig,
) -> Result<PartialDataset> {
    config.validate()?;
    if features.is_empty() {
        return Err(Error::Empty("features"));
    }
    if features.len() != truths.len() {
        return Err(Error::DimensionMismatch { expected: features.len(), got: truths.len() });
    }
    for &y in truths {
        space.check(y)?;
    }
    let clusters = kmeans(features, config.n_clusters, KMEANS_RESTARTS, &mut rng_stream(config.seed, 1));
    let n_clusters = clusters.iter().copied().max().unwrap_or(0) + 1;
    let mut rng = rng_stream(config.seed, 2);
    let alphas: AlphaTable = space
        .labels()
        .map(|_| (0..n_clusters).map(|_| rng.random::<f64>() * config.alpha_max).collect())
        .collect();
    let bags = generate_bags(truths, &clusters, &alphas, config.noise_nu, space, &mut rng)?;
    let examples = features
        .iter()
        .zip(truths)
        .zip(bags)
        .map(|((x, &y), bag)| PartialExample { x: x.clone(), bag, truth: Some(y) })
        .collect();
    PartialDataset::new(examples, space)
}

/// Per example, with probability `rate`: drop the truth from a bag that has
/// other labels, or swap a singleton truth bag for a uniform wrong label.
pub fn remove_truth_noise(dataset: &PartialDataset, rate: f64, seed: u64) -> Result<PartialDataset> {
    if !(0.0..=1.0).contains(&rate) {
        return Err(Error::InvalidParameter(format!("noise rate must lie in [0,1], got {rate}")));
    }
    let truths = dataset.truths()?;
    let space = dataset.label_space();
    let c = space.len();
    let mut rng = rng_stream(seed, 3);
    let examples = dataset
        .examples()
        .iter()
        .zip(truths)
        .map(|(ex, y)| {
            let hit = rng.random::<f64>() < rate;
            let bag = if hit && ex.bag.contains(y) {
                match ex.bag.without(y) {
                    Some(rest) => rest,
                    None => {
                        let mut other = rng.random_range(1..c);
                        if other >= y {
                            other += 1;
                        }
                        Bag::singleton(other)
                    }
                }
            } else {
                ex.bag
            };
            PartialExample { x: ex.x.clone(), bag, truth: ex.truth }
        })
        .collect();
    PartialDataset::new(examples, space)
}
