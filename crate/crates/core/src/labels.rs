//! Label spaces and candidate bags.
//!
//! Labels are 1-based integers `1..=c`. A [`Bag`] stores its members as a
//! single 64-bit mask where bit `y - 1` marks label `y`.

use std::fmt;

use crate::error::{Error, Result};

/// A 1-based class label.
pub type Label = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LabelSpace {
    c: usize,
}

impl LabelSpace {
    pub const MAX_LABELS: usize = 64;

    pub fn new(c: usize) -> Result<Self> {
        if !(2..=Self::MAX_LABELS).contains(&c) {
            return Err(Error::InvalidLabelSpace(format!(
                "need 2 <= c <= {}, got {c}",
                Self::MAX_LABELS
            )));
        }
        Ok(Self { c })
    }

    /// Number of labels `c`.
    pub fn len(&self) -> usize {
        self.c
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn labels(&self) -> std::ops::RangeInclusive<Label> {
        1..=self.c
    }

    pub fn contains(&self, y: Label) -> bool {
        (1..=self.c).contains(&y)
    }

    pub fn check(&self, y: Label) -> Result<Label> {
        if self.contains(y) {
            Ok(y)
        } else {
            Err(Error::LabelOutOfRange { label: y, c: self.c })
        }
    }

    /// The bag containing every label.
    pub fn full_bag(&self) -> Bag {
        Bag(self.full_mask())
    }

    fn full_mask(&self) -> u64 {
        if self.c == 64 {
            u64::MAX
        } else {
            (1u64 << self.c) - 1
        }
    }

    /// Number of nonempty bags, `2^c - 1`. Only meaningful for `c < 64`.
    pub fn num_bags(&self) -> usize {
        assert!(self.c < 64, "bag enumeration needs c < 64");
        (1usize << self.c) - 1
    }

    /// Nonempty bags in canonical order (ascending mask value). The bag at
    /// position `i` has mask `i + 1`.
    pub fn bags(&self) -> impl Iterator<Item = Bag> {
        (1..=self.num_bags() as u64).map(Bag)
    }
}

/// A nonempty set of candidate labels.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bag(u64);

impl Bag {
    pub fn singleton(y: Label) -> Self {
        assert!((1..=64).contains(&y), "label {y} out of bitmask range");
        Bag(1u64 << (y - 1))
    }

    pub fn from_mask(mask: u64, space: LabelSpace) -> Result<Self> {
        if mask == 0 {
            return Err(Error::EmptyBag);
        }
        if mask & !space.full_mask() != 0 {
            let label = 64 - mask.leading_zeros() as usize;
            return Err(Error::LabelOutOfRange { label, c: space.len() });
        }
        Ok(Bag(mask))
    }

    pub fn from_labels<I: IntoIterator<Item = Label>>(labels: I, space: LabelSpace) -> Result<Self> {
        let mut mask = 0u64;
        for y in labels {
            space.check(y)?;
            mask |= 1u64 << (y - 1);
        }
        Self::from_mask(mask, space)
    }

    /// Parses the `;`-separated CSV representation, e.g. `1;3;4`.
    pub fn parse(s: &str, space: LabelSpace) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::EmptyBag);
        }
        let mut labels = Vec::new();
        for tok in s.split(';') {
            let tok = tok.trim();
            let y: Label = tok
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("bad label `{tok}` in bag `{s}`")))?;
            labels.push(y);
        }
        Self::from_labels(labels, space)
    }

    pub fn mask(self) -> u64 {
        self.0
    }

    /// Position of this bag in the canonical enumeration.
    pub fn canonical_index(self) -> usize {
        (self.0 - 1) as usize
    }

    pub fn contains(self, y: Label) -> bool {
        (1..=64).contains(&y) && self.0 & (1u64 << (y - 1)) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn with(self, y: Label) -> Self {
        Bag(self.0 | Bag::singleton(y).0)
    }

    /// The bag without `y`, or `None` if that would leave it empty.
    pub fn without(self, y: Label) -> Option<Self> {
        let mask = self.0 & !Bag::singleton(y).0;
        (mask != 0).then_some(Bag(mask))
    }

    pub fn is_subset(self, other: Bag) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn intersects(self, other: Bag) -> bool {
        self.0 & other.0 != 0
    }

    /// Smallest member.
    pub fn first(self) -> Label {
        self.0.trailing_zeros() as usize + 1
    }

    /// Members in ascending order.
    pub fn labels(self) -> impl Iterator<Item = Label> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let y = rest.trailing_zeros() as usize + 1;
            rest &= rest - 1;
            Some(y)
        })
    }
}

impl fmt::Display for Bag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for y in self.labels() {
            if !first {
                f.write_str(";")?;
            }
            write!(f, "{y}")?;
            first = false;
        }
        Ok(())
    }
}

impl fmt::Debug for Bag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{self}}}")
    }
}

/// Labels whose value is within [`PROB_TOL`](crate::PROB_TOL) of the maximum.
pub(crate) fn argmax_set(values: &[f64]) -> Bag {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut mask = 0u64;
    for (i, &v) in values.iter().enumerate() {
        if v >= max - crate::PROB_TOL {
            mask |= 1u64 << i;
        }
    }
    Bag(mask)
}
