//! Finite-support joint distributions over instances, labels and bags.
//!
//! A [`DiscreteDistribution`] is a list of atoms. Every atom carries a
//! location, a probability mass, the label distribution `P(y|x)` and the
//! bag-generation matrix `P(s|y,x)` whose rows follow the canonical bag
//! enumeration of [`LabelSpace::bags`].

mod text;

pub use text::{parse_distribution, write_distribution};

use crate::error::{Error, Result};
use crate::labels::{argmax_set, Bag, Label, LabelSpace};
use crate::PROB_TOL;

/// Largest label count for which the full bag space may be materialized.
pub const MAX_MATERIALIZED_LABELS: usize = 12;

#[derive(Clone, Debug, PartialEq)]
pub struct LabelDistribution {
    probs: Vec<f64>,
}

impl LabelDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.len() < 2 {
            return Err(Error::InvalidDistribution("need at least two labels".into()));
        }
        if probs.iter().any(|&p| !(-PROB_TOL..=1.0 + PROB_TOL).contains(&p)) {
            return Err(Error::InvalidDistribution(format!("probability outside [0,1]: {probs:?}")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PROB_TOL {
            return Err(Error::InvalidDistribution(format!("label probabilities sum to {total}")));
        }
        Ok(Self { probs })
    }

    /// Point mass on `y`.
    pub fn point(space: LabelSpace, y: Label) -> Self {
        let mut probs = vec![0.0; space.len()];
        probs[y - 1] = 1.0;
        Self { probs }
    }

    pub fn uniform(space: LabelSpace) -> Self {
        let c = space.len();
        Self { probs: vec![1.0 / c as f64; c] }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, y: Label) -> f64 {
        self.probs[y - 1]
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Full argmax set (ties within tolerance included).
    pub fn argmax(&self) -> Bag {
        argmax_set(&self.probs)
    }

    pub(crate) fn swap(&mut self, a: Label, b: Label) {
        self.probs.swap(a - 1, b - 1);
    }
}

/// The `|S| x c` matrix of `P(s_j | y = i, x)`, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct BagGenMatrix {
    space: LabelSpace,
    entries: Vec<f64>,
}

impl BagGenMatrix {
    /// Builds from a row-major `(2^c - 1) x c` buffer.
    pub fn new(space: LabelSpace, entries: Vec<f64>) -> Result<Self> {
        check_materializable(space)?;
        let c = space.len();
        let rows = space.num_bags();
        if entries.len() != rows * c {
            return Err(Error::InvalidDistribution(format!(
                "bag-generation matrix needs {rows}x{c} entries, got {}",
                entries.len()
            )));
        }
        if entries.iter().any(|&p| !(-PROB_TOL..=1.0 + PROB_TOL).contains(&p)) {
            return Err(Error::InvalidDistribution("bag probability outside [0,1]".into()));
        }
        for y in 0..c {
            let total: f64 = (0..rows).map(|r| entries[r * c + y]).sum();
            if (total - 1.0).abs() > PROB_TOL {
                return Err(Error::InvalidDistribution(format!(
                    "column for label {} sums to {total}",
                    y + 1
                )));
            }
        }
        Ok(Self { space, entries })
    }

    /// Builds by evaluating `f(bag, y) = P(bag | y)` for every cell.
    pub fn from_fn<F: FnMut(Bag, Label) -> f64>(space: LabelSpace, mut f: F) -> Result<Self> {
        check_materializable(space)?;
        let mut entries = Vec::with_capacity(space.num_bags() * space.len());
        for bag in space.bags() {
            for y in space.labels() {
                entries.push(f(bag, y));
            }
        }
        Self::new(space, entries)
    }

    /// `s = {y}` with probability one.
    pub fn identity(space: LabelSpace) -> Result<Self> {
        Self::from_fn(space, |s, y| if s == Bag::singleton(y) { 1.0 } else { 0.0 })
    }

    /// `s = Y` with probability one, whatever the label.
    pub fn full(space: LabelSpace) -> Result<Self> {
        let full = space.full_bag();
        Self::from_fn(space, |s, _| if s == full { 1.0 } else { 0.0 })
    }

    /// `s = {perm[y - 1]}` with probability one.
    pub fn permutation(space: LabelSpace, perm: &[Label]) -> Result<Self> {
        if perm.len() != space.len() {
            return Err(Error::InvalidParameter("permutation length != c".into()));
        }
        let mut seen = Bag::singleton(space.check(perm[0])?);
        for &p in &perm[1..] {
            space.check(p)?;
            if seen.contains(p) {
                return Err(Error::InvalidParameter("not a permutation".into()));
            }
            seen = seen.with(p);
        }
        Self::from_fn(space, |s, y| if s == Bag::singleton(perm[y - 1]) { 1.0 } else { 0.0 })
    }

    /// Independent inclusion: given truth `i`, label `j` enters the bag with
    /// probability `q[i-1][j-1]`. Mass on the empty bag must be zero, which
    /// holds whenever every row has some `q = 1`.
    pub fn independent_flip(space: LabelSpace, q: &[Vec<f64>]) -> Result<Self> {
        let c = space.len();
        if q.len() != c || q.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidParameter("inclusion matrix must be c x c".into()));
        }
        Self::from_fn(space, |s, i| {
            (1..=c)
                .map(|j| {
                    let p = q[i - 1][j - 1];
                    if s.contains(j) {
                        p
                    } else {
                        1.0 - p
                    }
                })
                .product()
        })
    }

    pub fn label_space(&self) -> LabelSpace {
        self.space
    }

    pub fn num_rows(&self) -> usize {
        self.entries.len() / self.space.len()
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn entry(&self, bag: Bag, y: Label) -> f64 {
        self.entries[bag.canonical_index() * self.space.len() + y - 1]
    }

    pub fn column(&self, y: Label) -> Vec<f64> {
        let c = self.space.len();
        (0..self.num_rows()).map(|r| self.entries[r * c + y - 1]).collect()
    }

    /// Matrix-vector product `M q`. `q` may be any real vector of length c.
    pub fn apply(&self, q: &[f64]) -> Vec<f64> {
        let c = self.space.len();
        assert_eq!(q.len(), c, "vector length must equal label count");
        self.entries.chunks_exact(c).map(|row| row.iter().zip(q).map(|(a, b)| a * b).sum()).collect()
    }

    pub(crate) fn swap_columns(&mut self, a: Label, b: Label) {
        let c = self.space.len();
        for row in self.entries.chunks_exact_mut(c) {
            row.swap(a - 1, b - 1);
        }
    }
}

fn check_materializable(space: LabelSpace) -> Result<()> {
    if space.len() > MAX_MATERIALIZED_LABELS {
        return Err(Error::InvalidParameter(format!(
            "bag space materialization requires c <= {MAX_MATERIALIZED_LABELS}, got {}",
            space.len()
        )));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct Atom {
    pub location: Vec<f64>,
    pub mass: f64,
    pub label_dist: LabelDistribution,
    pub baggen: BagGenMatrix,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteDistribution {
    atoms: Vec<Atom>,
    label_space: LabelSpace,
}

impl DiscreteDistribution {
    pub fn new(atoms: Vec<Atom>, label_space: LabelSpace) -> Result<Self> {
        let first = atoms.first().ok_or(Error::Empty("distribution atoms"))?;
        let dim = first.location.len();
        let mut total = 0.0;
        for (i, a) in atoms.iter().enumerate() {
            if a.location.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: a.location.len() });
            }
            if a.location.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite);
            }
            if !(a.mass > 0.0) {
                return Err(Error::InvalidDistribution(format!("atom {i} has mass {}", a.mass)));
            }
            if a.label_dist.len() != label_space.len() || a.baggen.label_space() != label_space {
                return Err(Error::InvalidDistribution(format!("atom {i} has the wrong label count")));
            }
            total += a.mass;
        }
        if (total - 1.0).abs() > PROB_TOL {
            return Err(Error::InvalidDistribution(format!("atom masses sum to {total}")));
        }
        for i in 0..atoms.len() {
            for j in i + 1..atoms.len() {
                if atoms[i].location == atoms[j].location {
                    return Err(Error::InvalidDistribution(format!("atoms {i} and {j} share a location")));
                }
            }
        }
        Ok(Self { atoms, label_space })
    }

    /// Convenience for single-point instance spaces.
    pub fn single_atom(label_dist: LabelDistribution, baggen: BagGenMatrix) -> Result<Self> {
        let space = baggen.label_space();
        Self::new(vec![Atom { location: vec![0.0], mass: 1.0, label_dist, baggen }], space)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn atom(&self, index: usize) -> Result<&Atom> {
        self.atoms.get(index).ok_or(Error::IndexOutOfRange { index, len: self.atoms.len() })
    }

    pub fn label_space(&self) -> LabelSpace {
        self.label_space
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// `P(s|x) = sum_y P(s|y,x) P(y|x)` over the canonical bag order.
    pub fn bag_marginal(&self, atom_index: usize) -> Result<Vec<f64>> {
        let atom = self.atom(atom_index)?;
        Ok(atom.baggen.apply(atom.label_dist.probs()))
    }

    /// `P(S_y|x)` for every label at one atom.
    pub fn label_frequencies(&self, atom_index: usize) -> Result<Vec<f64>> {
        label_frequencies(&self.bag_marginal(atom_index)?, self.label_space)
    }

    pub(crate) fn atoms_mut(&mut self) -> &mut [Atom] {
        &mut self.atoms
    }
}

/// Sums a bag marginal over the bags containing each label.
pub fn label_frequencies(marginal: &[f64], space: LabelSpace) -> Result<Vec<f64>> {
    check_materializable(space)?;
    if marginal.len() != space.num_bags() {
        return Err(Error::InvalidDistribution(format!(
            "marginal has {} entries, expected {}",
            marginal.len(),
            space.num_bags()
        )));
    }
    let mut freq = vec![0.0; space.len()];
    for (bag, &p) in space.bags().zip(marginal) {
        for y in bag.labels() {
            freq[y - 1] += p;
        }
    }
    Ok(freq)
}

/// Full argmax set of `P(y|x)` at every atom.
pub fn bayes_rule(d: &DiscreteDistribution) -> Vec<Bag> {
    d.atoms.iter().map(|a| a.label_dist.argmax()).collect()
}

pub fn bayes_risk(d: &DiscreteDistribution) -> f64 {
    d.atoms
        .iter()
        .map(|a| {
            let top = a.label_dist.probs().iter().copied().fold(0.0, f64::max);
            a.mass * (1.0 - top)
        })
        .sum()
}
