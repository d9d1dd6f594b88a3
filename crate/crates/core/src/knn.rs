//! Exact Euclidean nearest-neighbor retrieval.
//!
//! Neighbors are ordered lexicographically by (squared distance, training
//! index). [`NeighborStream`] yields them one at a time from a binary heap so
//! the adaptive classifiers only pay for the neighbors they actually use.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct NeighborIndex {
    points: Vec<f64>,
    n: usize,
    dim: usize,
}

impl NeighborIndex {
    pub fn build<P: AsRef<[f64]>>(points: &[P]) -> Result<Self> {
        let first = points.first().ok_or(Error::Empty("neighbor index"))?;
        let dim = first.as_ref().len();
        if dim == 0 {
            return Err(Error::Empty("feature vector"));
        }
        let mut flat = Vec::with_capacity(points.len() * dim);
        for p in points {
            let p = p.as_ref();
            if p.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: p.len() });
            }
            if p.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite);
            }
            flat.extend_from_slice(p);
        }
        Ok(Self { points: flat, n: points.len(), dim })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn squared_distance(&self, i: usize, query: &[f64]) -> f64 {
        squared_distance(self.point(i), query)
    }

    pub fn stream(&self, query: &[f64]) -> Result<NeighborStream> {
        if query.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: query.len() });
        }
        let entries: Vec<Reverse<Entry>> = (0..self.n)
            .map(|i| Reverse(Entry { dist2: self.squared_distance(i, query), index: i }))
            .collect();
        Ok(NeighborStream { heap: BinaryHeap::from(entries) })
    }

    /// The `k` nearest neighbors as `(index, squared distance)`.
    pub fn nearest(&self, query: &[f64], k: usize) -> Result<Vec<(usize, f64)>> {
        Ok(self.stream(query)?.take(k).collect())
    }
}

pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[derive(Clone, Copy, Debug)]
struct Entry {
    dist2: f64,
    index: usize,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dist2.total_cmp(&other.dist2).then(self.index.cmp(&other.index))
    }
}

/// Iterator over `(training index, squared distance)` in neighbor order.
#[derive(Clone, Debug)]
pub struct NeighborStream {
    heap: BinaryHeap<Reverse<Entry>>,
}

impl NeighborStream {
    pub fn remaining(&self) -> usize {
        self.heap.len()
    }
}

impl Iterator for NeighborStream {
    type Item = (usize, f64);

    fn next(&mut self) -> Option<Self::Item> {
        self.heap.pop().map(|Reverse(e)| (e.index, e.dist2))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        (self.heap.len(), Some(self.heap.len()))
    }
}

impl ExactSizeIterator for NeighborStream {}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn order(points: &[Vec<f64>], q: &[f64]) -> Vec<usize> {
        NeighborIndex::build(points).unwrap().stream(q).unwrap().map(|(i, _)| i).collect()
    }

    #[test]
    fn line_example() {
        let pts = vec![vec![0.0], vec![1.0], vec![2.0]];
        assert_eq!(order(&pts, &[0.9]), vec![1, 0, 2]);
        assert_eq!(order(&pts, &[1.0]), vec![1, 0, 2]);
        assert_eq!(order(&pts, &[2.0])[0], 2);
    }

    #[test]
    fn ties_and_duplicates_by_index() {
        let pts = vec![vec![1.0], vec![-1.0], vec![1.0]];
        assert_eq!(order(&pts, &[0.0]), vec![0, 1, 2]);
        assert_eq!(order(&pts, &[1.0]), vec![0, 2, 1]);
    }

    #[test]
    fn single_point_and_errors() {
        let idx = NeighborIndex::build(&[vec![3.0, 4.0]]).unwrap();
        assert_eq!(idx.len(), 1);
        let mut s = idx.stream(&[0.0, 0.0]).unwrap();
        assert_eq!(s.next(), Some((0, 25.0)));
        assert_eq!(s.next(), None);
        assert!(matches!(idx.stream(&[0.0]), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(NeighborIndex::build(&[vec![f64::INFINITY]]), Err(Error::NonFinite)));
        assert!(NeighborIndex::build(&[vec![1.0], vec![1.0, 2.0]]).is_err());
        assert!(NeighborIndex::build::<Vec<f64>>(&[]).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn stream_matches_full_sort(
            pts in prop::collection::vec(prop::collection::vec(-5i32..5, 2), 1..300),
            q in prop::collection::vec(-50i32..50, 2),
        ) {
            // Integer grid coordinates force plenty of distance ties.
            let pts: Vec<Vec<f64>> = pts.iter().map(|p| p.iter().map(|&v| v as f64).collect()).collect();
            let q: Vec<f64> = q.iter().map(|&v| v as f64 / 10.0).collect();
            let mut oracle: Vec<(f64, usize)> = pts
                .iter()
                .enumerate()
                .map(|(i, p)| ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2), i))
                .collect();
            oracle.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
            let idx = NeighborIndex::build(&pts).unwrap();
            let got: Vec<usize> = idx.stream(&q).unwrap().map(|(i, _)| i).collect();
            let want: Vec<usize> = oracle.iter().map(|e| e.1).collect();
            prop_assert_eq!(&got, &want);
            let again: Vec<usize> = idx.stream(&q).unwrap().map(|(i, _)| i).collect();
            prop_assert_eq!(got, again);
        }
    }
}
