//! Sampleable two-dimensional scenarios with known conditional laws.
//!
//! * `two_gaussians`: labels 1 and 2 with class-conditionals
//!   `N((-mu, 0), s^2 I)` and `N((mu, 0), s^2 I)`, equal priors. The true
//!   label is always in the bag and every other label joins independently
//!   with probability `distractor_prob`, so bags are label-aligned.
//! * `relaxed`: the same instance law, but on the half-plane
//!   `G = {x2 >= t}` of mass `region_mass` the posterior is flattened to
//!   `(1/2 + theta/2, 1/2 - theta/2)` and bags are the singleton of the
//!   *other* label. Outside `G` bags are singleton truths.
//! * `clusters` ([`ClusterScenario`]): `c` isotropic Gaussian classes with
//!   means evenly spaced on a circle; supervised only, bags come from
//!   [`make_bags`](super::make_bags).

use rand::Rng;
use rand_distr::StandardNormal;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::dataset::{PartialDataset, PartialExample};
use crate::error::{Error, Result};
use crate::labels::{argmax_set, Bag, Label, LabelSpace};

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioParams {
    /// Half distance between the two class means.
    pub mean_offset: f64,
    pub sigma: f64,
    pub distractor_prob: f64,
    pub region_mass: f64,
    pub theta: f64,
    /// Grid cells per axis for oracle integration.
    pub grid: usize,
    /// Integration square is `[-extent, extent]^2`.
    pub extent: f64,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        Self {
            mean_offset: 1.0,
            sigma: 1.0,
            distractor_prob: 0.0,
            region_mass: 0.1,
            theta: 0.05,
            grid: 400,
            extent: 8.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub x: Vec<f64>,
    pub y: Label,
    pub bag: Bag,
}

#[derive(Clone, Debug, PartialEq)]
pub enum AnalyticScenario {
    TwoGaussians { mean_offset: f64, sigma: f64, distractor_prob: f64, grid: usize, extent: f64 },
    Relaxed { mean_offset: f64, sigma: f64, region_start: f64, region_mass: f64, theta: f64, grid: usize, extent: f64 },
}

/// Grid-integrated oracle quantities.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleReport {
    pub total_mass: f64,
    pub bayes_risk: f64,
    /// Mass of the region where bags are not label-aligned by construction.
    pub region_mass: f64,
    pub theta: f64,
    /// Mass (outside the region) where bag-frequency and posterior argmax differ.
    pub misaligned_mass: f64,
    /// Largest `max_j P(j|x) - P(i|x)` over grid cells, `i` a bag-frequency argmax.
    pub max_gap: f64,
}

pub fn analytic_scenario(name: &str, params: &ScenarioParams) -> Result<AnalyticScenario> {
    if !(params.sigma > 0.0) || !params.mean_offset.is_finite() {
        return Err(Error::InvalidParameter("sigma must be positive and mean_offset finite".into()));
    }
    if params.grid == 0 || !(params.extent > 0.0) {
        return Err(Error::InvalidParameter("grid and extent must be positive".into()));
    }
    match name {
        "two_gaussians" => {
            if !(0.0..1.0).contains(&params.distractor_prob) {
                return Err(Error::InvalidParameter("distractor_prob must lie in [0,1)".into()));
            }
            Ok(AnalyticScenario::TwoGaussians {
                mean_offset: params.mean_offset,
                sigma: params.sigma,
                distractor_prob: params.distractor_prob,
                grid: params.grid,
                extent: params.extent,
            })
        }
        "relaxed" => {
            if !(params.region_mass > 0.0 && params.region_mass < 1.0) {
                return Err(Error::InvalidParameter("region_mass must lie in (0,1)".into()));
            }
            if !(0.0..=1.0).contains(&params.theta) {
                return Err(Error::InvalidParameter("theta must lie in [0,1]".into()));
            }
            let std = Normal::new(0.0, 1.0).expect("standard normal");
            Ok(AnalyticScenario::Relaxed {
                mean_offset: params.mean_offset,
                sigma: params.sigma,
                region_start: params.sigma * std.inverse_cdf(1.0 - params.region_mass),
                region_mass: params.region_mass,
                theta: params.theta,
                grid: params.grid,
                extent: params.extent,
            })
        }
        other => Err(Error::UnknownScenario(other.to_string())),
    }
}

fn gaussian_pdf(x: &[f64], mean: [f64; 2], sigma: f64) -> f64 {
    let d2 = (x[0] - mean[0]).powi(2) + (x[1] - mean[1]).powi(2);
    (-d2 / (2.0 * sigma * sigma)).exp() / (2.0 * std::f64::consts::PI * sigma * sigma)
}

impl AnalyticScenario {
    pub fn label_space(&self) -> LabelSpace {
        LabelSpace::new(2).expect("two labels")
    }

    fn geometry(&self) -> (f64, f64, usize, f64) {
        match *self {
            Self::TwoGaussians { mean_offset, sigma, grid, extent, .. } => (mean_offset, sigma, grid, extent),
            Self::Relaxed { mean_offset, sigma, grid, extent, .. } => (mean_offset, sigma, grid, extent),
        }
    }

    fn means(&self) -> [[f64; 2]; 2] {
        let (mu, ..) = self.geometry();
        [[-mu, 0.0], [mu, 0.0]]
    }

    pub fn in_region(&self, x: &[f64]) -> bool {
        match *self {
            Self::TwoGaussians { .. } => false,
            Self::Relaxed { region_start, .. } => x[1] >= region_start,
        }
    }

    /// Marginal density of the instance.
    pub fn density(&self, x: &[f64]) -> f64 {
        let (_, sigma, ..) = self.geometry();
        let [m1, m2] = self.means();
        0.5 * gaussian_pdf(x, m1, sigma) + 0.5 * gaussian_pdf(x, m2, sigma)
    }

    /// `P(y|x)` for `y = 1, 2`.
    pub fn posterior(&self, x: &[f64]) -> Vec<f64> {
        if let Self::Relaxed { theta, .. } = *self {
            if self.in_region(x) {
                return vec![0.5 + theta / 2.0, 0.5 - theta / 2.0];
            }
        }
        let (mu, sigma, ..) = self.geometry();
        // Log-likelihood ratio of label 2 against label 1 is 2 mu x1 / sigma^2.
        let p2 = 1.0 / (1.0 + (-2.0 * mu * x[0] / (sigma * sigma)).exp());
        vec![1.0 - p2, p2]
    }

    /// `P(S_y|x)` for `y = 1, 2`.
    pub fn label_frequencies(&self, x: &[f64]) -> Vec<f64> {
        let post = self.posterior(x);
        match *self {
            Self::TwoGaussians { distractor_prob: beta, .. } => {
                post.iter().map(|&p| p + (1.0 - p) * beta).collect()
            }
            Self::Relaxed { .. } if self.in_region(x) => vec![post[1], post[0]],
            Self::Relaxed { .. } => post,
        }
    }

    /// Smallest label of the posterior argmax.
    pub fn bayes_label(&self, x: &[f64]) -> Label {
        argmax_set(&self.posterior(x)).first()
    }

    pub fn sample<R: Rng>(&self, n: usize, rng: &mut R) -> Vec<Sample> {
        let (_, sigma, ..) = self.geometry();
        let means = self.means();
        (0..n)
            .map(|_| {
                let component = rng.random_range(1..=2usize);
                let m = means[component - 1];
                let x = vec![
                    m[0] + sigma * rng.sample::<f64, _>(StandardNormal),
                    m[1] + sigma * rng.sample::<f64, _>(StandardNormal),
                ];
                match *self {
                    Self::TwoGaussians { distractor_prob, .. } => {
                        let other = 3 - component;
                        let mut bag = Bag::singleton(component);
                        if rng.random::<f64>() < distractor_prob {
                            bag = bag.with(other);
                        }
                        Sample { x, y: component, bag }
                    }
                    Self::Relaxed { theta, .. } => {
                        if self.in_region(&x) {
                            let y = if rng.random::<f64>() < 0.5 + theta / 2.0 { 1 } else { 2 };
                            Sample { x, y, bag: Bag::singleton(3 - y) }
                        } else {
                            Sample { x, y: component, bag: Bag::singleton(component) }
                        }
                    }
                }
            })
            .collect()
    }

    pub fn sample_dataset<R: Rng>(&self, n: usize, rng: &mut R) -> Result<PartialDataset> {
        let examples = self
            .sample(n, rng)
            .into_iter()
            .map(|s| PartialExample { x: s.x, bag: s.bag, truth: Some(s.y) })
            .collect();
        PartialDataset::new(examples, self.label_space())
    }

    /// Midpoint-rule integration over the configured grid.
    pub fn oracle(&self) -> OracleReport {
        let (_, _, grid, extent) = self.geometry();
        let h = 2.0 * extent / grid as f64;
        let cell = h * h;
        let mut report = OracleReport {
            total_mass: 0.0,
            bayes_risk: 0.0,
            region_mass: 0.0,
            theta: match *self {
                Self::TwoGaussians { .. } => 0.0,
                Self::Relaxed { theta, .. } => theta,
            },
            misaligned_mass: 0.0,
            max_gap: 0.0,
        };
        for i in 0..grid {
            for j in 0..grid {
                let x = [-extent + (i as f64 + 0.5) * h, -extent + (j as f64 + 0.5) * h];
                let w = self.density(&x) * cell;
                let post = self.posterior(&x);
                let top = post.iter().copied().fold(0.0, f64::max);
                report.total_mass += w;
                report.bayes_risk += w * (1.0 - top);
                let bag_top = argmax_set(&self.label_frequencies(&x));
                if self.in_region(&x) {
                    report.region_mass += w;
                } else if bag_top != argmax_set(&post) {
                    report.misaligned_mass += w;
                }
                for i in bag_top.labels() {
                    report.max_gap = report.max_gap.max(top - post[i - 1]);
                }
            }
        }
        report
    }
}

/// `c` Gaussian classes centered on a circle of radius `radius`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClusterScenario {
    pub labels: usize,
    pub radius: f64,
    pub sigma: f64,
}

impl Default for ClusterScenario {
    fn default() -> Self {
        Self { labels: 10, radius: 4.0, sigma: 1.0 }
    }
}

impl ClusterScenario {
    pub fn label_space(&self) -> Result<LabelSpace> {
        LabelSpace::new(self.labels)
    }

    pub fn mean(&self, y: Label) -> [f64; 2] {
        let angle = 2.0 * std::f64::consts::PI * (y - 1) as f64 / self.labels as f64;
        [self.radius * angle.cos(), self.radius * angle.sin()]
    }

    /// Features and true labels (uniform class prior).
    pub fn sample<R: Rng>(&self, n: usize, rng: &mut R) -> (Vec<Vec<f64>>, Vec<Label>) {
        let mut xs = Vec::with_capacity(n);
        let mut ys = Vec::with_capacity(n);
        for _ in 0..n {
            let y = rng.random_range(1..=self.labels);
            let m = self.mean(y);
            xs.push(vec![
                m[0] + self.sigma * rng.sample::<f64, _>(StandardNormal),
                m[1] + self.sigma * rng.sample::<f64, _>(StandardNormal),
            ]);
            ys.push(y);
        }
        (xs, ys)
    }
}
