//! Label alignment: the most frequent label across bags matches the most
//! probable label. Exact checks on finite-support distributions, a probing
//! falsifier for bag processes, the relaxed variant, and the flip that
//! builds a marginal-equivalent distribution with different Bayes labels.

use std::collections::BTreeSet;

use rand::Rng;

use crate::distribution::{label_frequencies, BagGenMatrix, DiscreteDistribution, LabelDistribution};
use crate::error::{Error, Result};
use crate::labels::{argmax_set, Bag, Label};
use crate::synth::rng_stream;
use crate::PROB_TOL;

/// Bag-frequency argmax at one atom.
pub fn frequency_argmax(d: &DiscreteDistribution, atom: usize) -> Result<Bag> {
    Ok(argmax_set(&d.label_frequencies(atom)?))
}

pub fn is_atom_aligned(d: &DiscreteDistribution, atom: usize) -> Result<bool> {
    Ok(frequency_argmax(d, atom)? == d.atom(atom)?.label_dist.argmax())
}

pub fn is_label_aligned_dist(d: &DiscreteDistribution) -> bool {
    (0..d.len()).all(|i| is_atom_aligned(d, i).expect("index in range"))
}

/// Does `Q` satisfy alignment under the process `m`?
pub fn aligned_at(m: &BagGenMatrix, q: &LabelDistribution) -> Result<bool> {
    let freq = label_frequencies(&m.apply(q.probs()), m.label_space())?;
    Ok(argmax_set(&freq) == q.argmax())
}

#[derive(Clone, Debug, PartialEq)]
pub enum ProcessAlignment {
    /// No probe violated alignment; not a proof.
    AlignedSoFar { probes: usize },
    Counterexample(LabelDistribution),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeSet {
    pub vertices: bool,
    pub midpoints: bool,
    pub dirichlet: usize,
    pub seed: u64,
}

impl ProbeSet {
    pub fn exhaustive(dirichlet: usize) -> Self {
        Self { vertices: true, midpoints: true, dirichlet, seed: 0 }
    }

    pub fn vertices_only() -> Self {
        Self { vertices: true, midpoints: false, dirichlet: 0, seed: 0 }
    }
}

/// Falsifier: simplex vertices, edge midpoints and `n_probes` flat-Dirichlet
/// draws. Returns the first violating `Q`.
pub fn is_label_aligned_process(m: &BagGenMatrix, n_probes: usize) -> Result<ProcessAlignment> {
    if n_probes == 0 {
        return Err(Error::InvalidParameter("n_probes must be at least 1".into()));
    }
    probe_alignment(m, &ProbeSet::exhaustive(n_probes))
}

pub fn probe_alignment(m: &BagGenMatrix, probes: &ProbeSet) -> Result<ProcessAlignment> {
    let space = m.label_space();
    let c = space.len();
    let mut count = 0;
    let mut check = |probs: Vec<f64>| -> Result<Option<LabelDistribution>> {
        count += 1;
        let q = LabelDistribution::new(probs)?;
        Ok((!aligned_at(m, &q)?).then_some(q))
    };
    if probes.vertices {
        for y in space.labels() {
            if let Some(q) = check(LabelDistribution::point(space, y).probs().to_vec())? {
                return Ok(ProcessAlignment::Counterexample(q));
            }
        }
    }
    if probes.midpoints {
        for i in 0..c {
            for j in i + 1..c {
                let mut p = vec![0.0; c];
                p[i] = 0.5;
                p[j] = 0.5;
                if let Some(q) = check(p)? {
                    return Ok(ProcessAlignment::Counterexample(q));
                }
            }
        }
    }
    let mut rng = rng_stream(probes.seed, 10);
    for _ in 0..probes.dirichlet {
        let draws: Vec<f64> = (0..c).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
        let total: f64 = draws.iter().sum();
        if let Some(q) = check(draws.iter().map(|v| v / total).collect())? {
            return Ok(ProcessAlignment::Counterexample(q));
        }
    }
    Ok(ProcessAlignment::AlignedSoFar { probes: count })
}

/// The region where alignment may fail and the posterior slack allowed there.
#[derive(Clone, Debug, PartialEq)]
pub struct RelaxedSpec {
    pub region: BTreeSet<usize>,
    pub theta: f64,
}

impl RelaxedSpec {
    pub fn new<I: IntoIterator<Item = usize>>(region: I, theta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&theta) {
            return Err(Error::InvalidParameter(format!("theta must lie in [0,1], got {theta}")));
        }
        Ok(Self { region: region.into_iter().collect(), theta })
    }
}

/// Labels whose probability is within `theta` of the most probable one.
pub fn near_optimal_labels(label_dist: &LabelDistribution, theta: f64) -> Bag {
    let probs = label_dist.probs();
    let top = probs.iter().copied().fold(0.0, f64::max);
    let mut bag: Option<Bag> = None;
    for (i, &p) in probs.iter().enumerate() {
        if top - p <= theta + PROB_TOL {
            bag = Some(bag.map_or(Bag::singleton(i + 1), |b| b.with(i + 1)));
        }
    }
    bag.expect("the maximum is always within theta")
}

pub fn check_relaxed(d: &DiscreteDistribution, spec: &RelaxedSpec) -> Result<bool> {
    if let Some(&bad) = spec.region.iter().find(|&&i| i >= d.len()) {
        return Err(Error::IndexOutOfRange { index: bad, len: d.len() });
    }
    for i in 0..d.len() {
        let ok = if spec.region.contains(&i) {
            frequency_argmax(d, i)?.is_subset(near_optimal_labels(&d.atoms()[i].label_dist, spec.theta))
        } else {
            is_atom_aligned(d, i)?
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// On every atom whose two argmax sets are disjoint, swaps the probabilities
/// of `y1` (smallest most probable label) and `y2` (smallest most frequent
/// label) together with the matching bag-generation columns. Bag marginals
/// are unchanged and the Bayes label moves on each flipped atom.
pub fn flip_distribution(d: &DiscreteDistribution) -> DiscreteDistribution {
    let mut out = d.clone();
    for (i, atom) in out.atoms_mut().iter_mut().enumerate() {
        let probable = atom.label_dist.argmax();
        let frequent = frequency_argmax(d, i).expect("index in range");
        if probable.intersects(frequent) {
            continue;
        }
        let (y1, y2): (Label, Label) = (probable.first(), frequent.first());
        atom.label_dist.swap(y1, y2);
        atom.baggen.swap_columns(y1, y2);
    }
    out
}

/// Indices of atoms that [`flip_distribution`] changes.
pub fn flipped_atoms(d: &DiscreteDistribution) -> Vec<usize> {
    (0..d.len())
        .filter(|&i| {
            let f = frequency_argmax(d, i).expect("index in range");
            !d.atoms()[i].label_dist.argmax().intersects(f)
        })
        .collect()
}
