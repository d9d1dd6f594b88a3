//! Exact advantage on finite supports.
//!
//! Balls around an atom only change at the distinct distances to other
//! atoms, so the balls `B_1 ⊂ B_2 ⊂ ...` (with masses `P_1 < P_2 < ...`) are
//! all there is to check. For a mass level `p` in `(P_{m-1}, P_m]` the
//! smallest radius reaching `p` is that of `B_m`, hence the best `gamma` for
//! the level is the smallest margin `min_{i in I, j notin I} P(S_i|B) -
//! P(S_j|B)` over `B_1..B_m`, and within the interval `p * gamma^2` peaks at
//! `p = min(P_m, A)`.

use crate::distribution::DiscreteDistribution;
use crate::error::{Error, Result};
use crate::knn::squared_distance;
use crate::labels::{argmax_set, Bag};

#[derive(Clone, Debug, PartialEq)]
pub struct AdvantageEntry {
    pub atom: usize,
    /// Most frequent labels across bags at the atom.
    pub argmax: Bag,
    pub advantage: f64,
    /// Witnessing mass level. `(1, 1)` when every label is most frequent,
    /// `(0, 0)` when no positive margin exists.
    pub p: f64,
    pub gamma: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdvantageReport {
    pub cap: f64,
    pub entries: Vec<AdvantageEntry>,
}

pub fn advantage(d: &DiscreteDistribution, atom_index: usize, cap: f64) -> Result<AdvantageEntry> {
    if !(cap > 0.0 && cap <= 1.0) {
        return Err(Error::InvalidParameter(format!("advantage cap must lie in (0,1], got {cap}")));
    }
    let center = d.atom(atom_index)?;
    let c = d.label_space().len();
    let freqs: Vec<Vec<f64>> = (0..d.len()).map(|i| d.label_frequencies(i)).collect::<Result<_>>()?;
    let top = argmax_set(&freqs[atom_index]);
    if top.len() == c {
        return Ok(AdvantageEntry { atom: atom_index, argmax: top, advantage: 1.0, p: 1.0, gamma: 1.0 });
    }

    let mut order: Vec<(f64, usize)> = d
        .atoms()
        .iter()
        .enumerate()
        .map(|(i, a)| (squared_distance(&a.location, &center.location), i))
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut mass = 0.0;
    let mut weighted = vec![0.0; c];
    let mut worst = f64::INFINITY;
    let mut best = AdvantageEntry { atom: atom_index, argmax: top, advantage: 0.0, p: 0.0, gamma: 0.0 };
    let mut k = 0;
    while k < order.len() {
        // Absorb every atom at this radius.
        let radius = order[k].0;
        while k < order.len() && order[k].0 == radius {
            let atom = &d.atoms()[order[k].1];
            mass += atom.mass;
            for (w, f) in weighted.iter_mut().zip(&freqs[order[k].1]) {
                *w += atom.mass * f;
            }
            k += 1;
        }
        worst = worst.min(ball_margin(&weighted, mass, top));
        let p = mass.min(cap);
        if worst > 0.0 {
            let value = p * worst * worst;
            if value > best.advantage {
                best.advantage = value;
                best.p = p;
                best.gamma = worst;
            }
        }
        if mass >= cap {
            break;
        }
    }
    Ok(best)
}

fn ball_margin(weighted: &[f64], mass: f64, top: Bag) -> f64 {
    let mut lowest_top = f64::INFINITY;
    let mut highest_rest = f64::NEG_INFINITY;
    for (i, w) in weighted.iter().enumerate() {
        let f = w / mass;
        if top.contains(i + 1) {
            lowest_top = lowest_top.min(f);
        } else {
            highest_rest = highest_rest.max(f);
        }
    }
    lowest_top - highest_rest
}

pub fn advantage_report(d: &DiscreteDistribution, cap: f64) -> Result<AdvantageReport> {
    let entries = (0..d.len()).map(|i| advantage(d, i, cap)).collect::<Result<_>>()?;
    Ok(AdvantageReport { cap, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::{Atom, BagGenMatrix, LabelDistribution};
    use crate::labels::LabelSpace;
    use approx::assert_abs_diff_eq;

    fn identity_dist(points: &[(f64, f64, Vec<f64>)]) -> DiscreteDistribution {
        let s = LabelSpace::new(points[0].2.len()).unwrap();
        let id = BagGenMatrix::identity(s).unwrap();
        let atoms = points
            .iter()
            .map(|(x, m, p)| Atom {
                location: vec![*x],
                mass: *m,
                label_dist: LabelDistribution::new(p.clone()).unwrap(),
                baggen: id.clone(),
            })
            .collect();
        DiscreteDistribution::new(atoms, s).unwrap()
    }

    #[test]
    fn single_atom() {
        let d = identity_dist(&[(0.0, 1.0, vec![0.6, 0.4])]);
        let e = advantage(&d, 0, 1.0).unwrap();
        assert_abs_diff_eq!(e.advantage, 0.04, epsilon = 1e-12);
        assert_abs_diff_eq!(e.gamma, 0.2, epsilon = 1e-12);
        assert_eq!(e.p, 1.0);
    }

    #[test]
    fn all_labels_tied_gives_one() {
        let d = identity_dist(&[(0.0, 0.5, vec![0.5, 0.5]), (1.0, 0.5, vec![0.9, 0.1])]);
        assert_eq!(advantage(&d, 0, 0.3).unwrap().advantage, 1.0);
    }

    #[test]
    fn two_atom_line() {
        let d = identity_dist(&[(0.0, 0.5, vec![0.9, 0.1]), (1.0, 0.5, vec![0.1, 0.9])]);
        let e = advantage(&d, 0, 1.0).unwrap();
        assert_abs_diff_eq!(e.advantage, 0.32, epsilon = 1e-12);
        assert_eq!(e.p, 0.5);
        assert_abs_diff_eq!(e.gamma, 0.8, epsilon = 1e-12);
        // A cap below the first ball limits the level.
        let capped = advantage(&d, 0, 0.25).unwrap();
        assert_abs_diff_eq!(capped.advantage, 0.25 * 0.64, epsilon = 1e-12);
    }

    #[test]
    fn rejects_bad_cap_and_index() {
        let d = identity_dist(&[(0.0, 1.0, vec![0.6, 0.4])]);
        assert!(advantage(&d, 0, 0.0).is_err());
        assert!(advantage(&d, 0, 1.5).is_err());
        assert!(advantage(&d, 2, 1.0).is_err());
    }
}
