//! Feature pipelines tuned for Euclidean neighbor retrieval.
//!
//! Both variants run: base transform, unit normalization, Gaussian-weighted
//! smoothing over the nearest training neighbors, re-normalization, then
//! division by the mean distance to the `density_k` nearest smoothed training
//! points. The vision variant centers by the training mean; the real-world
//! variant applies an element-wise signed cube root instead. Every statistic
//! comes from the training set; [`FittedPipeline::transform`] only reads it.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::knn::NeighborIndex;

type Rows = Vec<Vec<f64>>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    Vision,
    Realworld,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineConfig {
    pub variant: Variant,
    pub smoothing_alpha: f64,
    pub smoothing_k: usize,
    pub density_k: usize,
}

impl PipelineConfig {
    pub fn vision() -> Self {
        Self { variant: Variant::Vision, smoothing_alpha: 0.25, smoothing_k: 10, density_k: 50 }
    }

    pub fn realworld() -> Self {
        Self { variant: Variant::Realworld, smoothing_alpha: 0.1, smoothing_k: 10, density_k: 100 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.smoothing_alpha) {
            return Err(Error::InvalidParameter(format!(
                "smoothing_alpha must lie in [0,1], got {}",
                self.smoothing_alpha
            )));
        }
        if self.smoothing_k == 0 || self.density_k == 0 {
            return Err(Error::InvalidParameter("neighbor counts must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct FittedPipeline {
    config: PipelineConfig,
    mean: Option<Vec<f64>>,
    smoothed: Vec<Vec<f64>>,
    smoothed_index: NeighborIndex,
    radii: Vec<f64>,
    radius_floor: f64,
    output: Vec<Vec<f64>>,
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    // A zero vector has no direction; it stays at the origin.
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
}

/// Convex Gaussian weights for neighbor distances, bandwidth = median
/// distance. Uniform when the bandwidth is zero.
pub fn smoothing_weights(distances: &[f64]) -> Vec<f64> {
    let n = distances.len();
    if n == 0 {
        return Vec::new();
    }
    let mut sorted = distances.to_vec();
    sorted.sort_by(f64::total_cmp);
    let sigma = if n % 2 == 1 { sorted[n / 2] } else { 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]) };
    if sigma <= 0.0 {
        return vec![1.0 / n as f64; n];
    }
    let d2_min = sorted[0] * sorted[0];
    let raw: Vec<f64> = distances.iter().map(|d| (-(d * d - d2_min) / (2.0 * sigma * sigma)).exp()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

fn smooth(x: &[f64], neighbors: &[(usize, f64)], pool: &[Vec<f64>], alpha: f64) -> Vec<f64> {
    let dists: Vec<f64> = neighbors.iter().map(|&(_, d2)| d2.sqrt()).collect();
    let weights = smoothing_weights(&dists);
    let mut out: Vec<f64> = x.iter().map(|v| (1.0 - alpha) * v).collect();
    for (&(j, _), w) in neighbors.iter().zip(weights) {
        for (o, v) in out.iter_mut().zip(&pool[j]) {
            *o += alpha * w * v;
        }
    }
    normalize(&mut out);
    out
}

fn mean_distance(neighbors: &[(usize, f64)]) -> f64 {
    neighbors.iter().map(|&(_, d2)| d2.sqrt()).sum::<f64>() / neighbors.len() as f64
}

/// The `k` nearest to `query`, skipping training index `skip`.
fn neighbors_excluding(index: &NeighborIndex, query: &[f64], k: usize, skip: usize) -> Result<Vec<(usize, f64)>> {
    Ok(index.stream(query)?.filter(|&(j, _)| j != skip).take(k).collect())
}

impl FittedPipeline {
    pub fn fit(train: &[Vec<f64>], config: &PipelineConfig) -> Result<Self> {
        config.validate()?;
        let n = train.len();
        if n <= config.smoothing_k || n <= config.density_k {
            return Err(Error::InvalidParameter(format!(
                "pipeline needs more than {} training points, got {n}",
                config.smoothing_k.max(config.density_k)
            )));
        }
        let dim = train[0].len();
        for row in train {
            if row.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: row.len() });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite);
            }
        }
        let mean = match config.variant {
            Variant::Vision => {
                let mut m = vec![0.0; dim];
                for row in train {
                    for (a, v) in m.iter_mut().zip(row) {
                        *a += v;
                    }
                }
                m.iter_mut().for_each(|a| *a /= n as f64);
                Some(m)
            }
            Variant::Realworld => None,
        };
        let base: Vec<Vec<f64>> = train.iter().map(|x| base_transform(x, mean.as_deref())).collect();
        let base_index = NeighborIndex::build(&base)?;
        let smoothed = base
            .iter()
            .enumerate()
            .map(|(i, x)| {
                let nb = neighbors_excluding(&base_index, x, config.smoothing_k, i)?;
                Ok(smooth(x, &nb, &base, config.smoothing_alpha))
            })
            .collect::<Result<Vec<_>>>()?;
        let smoothed_index = NeighborIndex::build(&smoothed)?;
        let raw_radii = smoothed
            .iter()
            .enumerate()
            .map(|(i, x)| Ok(mean_distance(&neighbors_excluding(&smoothed_index, x, config.density_k, i)?)))
            .collect::<Result<Vec<f64>>>()?;
        let radius_floor = raw_radii.iter().copied().filter(|&r| r > 0.0).fold(f64::INFINITY, f64::min);
        let radius_floor = if radius_floor.is_finite() { radius_floor } else { 1.0 };
        let radii: Vec<f64> = raw_radii.iter().map(|&r| if r > 0.0 { r } else { radius_floor }).collect();
        let output = smoothed.iter().zip(&radii).map(|(x, r)| x.iter().map(|v| v / r).collect()).collect();
        Ok(Self { config: config.clone(), mean, smoothed, smoothed_index, radii, radius_floor, output })
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    /// Transformed training features.
    pub fn train_output(&self) -> &[Vec<f64>] {
        &self.output
    }

    /// Training features after smoothing and re-normalization, before density scaling.
    pub fn train_smoothed(&self) -> &[Vec<f64>] {
        &self.smoothed
    }

    pub fn train_radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn mean(&self) -> Option<&[f64]> {
        self.mean.as_deref()
    }

    /// Applies the fitted chain to new points. Output rows are returned in
    /// input order together with the pre-density vectors.
    pub fn transform_detailed(&self, test: &[Vec<f64>]) -> Result<(Rows, Rows)> {
        let dim = self.smoothed_index.dim();
        let rows = test
            .par_iter()
            .map(|x| {
                if x.len() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, got: x.len() });
                }
                if x.iter().any(|v| !v.is_finite()) {
                    return Err(Error::NonFinite);
                }
                let base = base_transform(x, self.mean.as_deref());
                let nb = self.smoothed_index.nearest(&base, self.config.smoothing_k)?;
                let smoothed = smooth(&base, &nb, &self.smoothed, self.config.smoothing_alpha);
                let r = mean_distance(&self.smoothed_index.nearest(&smoothed, self.config.density_k)?);
                let r = if r > 0.0 { r } else { self.radius_floor };
                let out = smoothed.iter().map(|v| v / r).collect();
                Ok((out, smoothed))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(rows.into_iter().unzip())
    }

    pub fn transform(&self, test: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        Ok(self.transform_detailed(test)?.0)
    }
}

fn base_transform(x: &[f64], mean: Option<&[f64]>) -> Vec<f64> {
    let mut v: Vec<f64> = match mean {
        Some(m) => x.iter().zip(m).map(|(a, b)| a - b).collect(),
        None => x.iter().map(|a| a.cbrt()).collect(),
    };
    normalize(&mut v);
    v
}

/// Element-wise `sign(x) |x|^(1/3)`.
pub fn signed_cube_root(x: &[f64]) -> Vec<f64> {
    x.iter().map(|v| v.cbrt()).collect()
}
