//! Fixtures, random instance generators and brute-force oracles shared by
//! the integration tests.
#![allow(dead_code)]

use partial_knn::distribution::{bayes_rule, Atom, BagGenMatrix, DiscreteDistribution, LabelDistribution};
use partial_knn::{Bag, LabelSpace};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn space(c: usize) -> LabelSpace {
    LabelSpace::new(c).unwrap()
}

/// Two single-atom distributions over two labels with inclusion matrices
/// `[[1, 2/3], [0, 1]]` and `[[1, 1/3], [1/2, 1]]`.
pub fn non_identifiable_pair() -> (DiscreteDistribution, DiscreteDistribution) {
    let s = space(2);
    let p = DiscreteDistribution::single_atom(
        LabelDistribution::new(vec![2.0 / 3.0, 1.0 / 3.0]).unwrap(),
        BagGenMatrix::independent_flip(s, &[vec![1.0, 2.0 / 3.0], vec![0.0, 1.0]]).unwrap(),
    )
    .unwrap();
    let q = DiscreteDistribution::single_atom(
        LabelDistribution::new(vec![1.0 / 3.0, 2.0 / 3.0]).unwrap(),
        BagGenMatrix::independent_flip(s, &[vec![1.0, 1.0 / 3.0], vec![0.5, 1.0]]).unwrap(),
    )
    .unwrap();
    (p, q)
}

/// Three-label single atoms where the truth emits `{1}`, `{3}` or `{1,2}`
/// with probabilities 0.1, 0.4, 0.5. In the first the truth is 1, in the
/// second it is 3. Other columns are the identity process.
pub fn alignment_pair() -> (DiscreteDistribution, DiscreteDistribution) {
    let s = space(3);
    let noisy = |truth: usize| {
        BagGenMatrix::from_fn(s, move |bag, y| {
            if y != truth {
                return if bag == Bag::singleton(y) { 1.0 } else { 0.0 };
            }
            match bag.mask() {
                0b001 => 0.1,
                0b100 => 0.4,
                0b011 => 0.5,
                _ => 0.0,
            }
        })
        .unwrap()
    };
    let p1 = DiscreteDistribution::single_atom(LabelDistribution::point(s, 1), noisy(1)).unwrap();
    let p2 = DiscreteDistribution::single_atom(LabelDistribution::point(s, 3), noisy(3)).unwrap();
    (p1, p2)
}

pub fn dirichlet<R: Rng>(len: usize, rng: &mut R) -> Vec<f64> {
    let draws: Vec<f64> = (0..len).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let total: f64 = draws.iter().sum();
    draws.into_iter().map(|v| v / total).collect()
}

/// Columns drawn independently and uniformly from the simplex over bags.
pub fn random_baggen<R: Rng>(s: LabelSpace, rng: &mut R) -> BagGenMatrix {
    let rows = s.num_bags();
    let cols: Vec<Vec<f64>> = (0..s.len()).map(|_| dirichlet(rows, rng)).collect();
    BagGenMatrix::from_fn(s, |bag, y| cols[y - 1][bag.canonical_index()]).unwrap()
}

/// A matrix with one column replaced by a copy of another or by the average
/// of two others; its columns are dependent by construction.
pub fn rank_deficient_baggen<R: Rng>(s: LabelSpace, rng: &mut R) -> BagGenMatrix {
    let rows = s.num_bags();
    let c = s.len();
    let mut cols: Vec<Vec<f64>> = (0..c).map(|_| dirichlet(rows, rng)).collect();
    let target = rng.random_range(0..c);
    let a = (target + 1 + rng.random_range(0..c - 1)) % c;
    if c >= 3 && rng.random::<bool>() {
        let mut b = rng.random_range(0..c);
        while b == target || b == a {
            b = rng.random_range(0..c);
        }
        cols[target] = cols[a].iter().zip(&cols[b]).map(|(x, y)| 0.5 * (x + y)).collect();
    } else {
        cols[target] = cols[a].clone();
    }
    BagGenMatrix::from_fn(s, |bag, y| cols[y - 1][bag.canonical_index()]).unwrap()
}

/// Random finite-support distribution with distinct locations in `dim` dimensions.
pub fn random_distribution<R: Rng>(n_atoms: usize, c: usize, dim: usize, rng: &mut R) -> DiscreteDistribution {
    let s = space(c);
    let masses = dirichlet(n_atoms, rng);
    let atoms = masses
        .into_iter()
        .map(|mass| Atom {
            location: (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect(),
            mass,
            label_dist: LabelDistribution::new(dirichlet(c, rng)).unwrap(),
            baggen: random_baggen(s, rng),
        })
        .collect();
    DiscreteDistribution::new(atoms, s).unwrap()
}

fn frequencies(d: &DiscreteDistribution, i: usize) -> Vec<f64> {
    // P(S_y | x) by summing the marginal over every bag that contains y.
    let s = d.label_space();
    let marginal = d.bag_marginal(i).unwrap();
    s.labels().map(|y| s.bags().filter(|b| b.contains(y)).map(|b| marginal[b.canonical_index()]).sum()).collect()
}

fn argmax(values: &[f64]) -> Vec<usize> {
    let top = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (0..values.len()).filter(|&i| values[i] >= top - 1e-9).collect()
}

/// Advantage by direct enumeration: for every candidate mass level `p <= cap`
/// the radius `r_p` is located by filtering atoms, and the margin is the
/// minimum over every ball of radius at most `r_p`, each recomputed from
/// scratch.
pub fn brute_force_advantage(d: &DiscreteDistribution, i: usize, cap: f64) -> f64 {
    let c = d.label_space().len();
    let freqs: Vec<Vec<f64>> = (0..d.len()).map(|j| frequencies(d, j)).collect();
    let top = argmax(&freqs[i]);
    if top.len() == c {
        return 1.0;
    }
    let center = &d.atoms()[i].location;
    let dist = |j: usize| -> f64 {
        d.atoms()[j].location.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
    };
    let mut radii: Vec<f64> = (0..d.len()).map(dist).collect();
    radii.sort_by(f64::total_cmp);
    radii.dedup();
    let ball_mass = |r: f64| -> f64 { (0..d.len()).filter(|&j| dist(j) <= r).map(|j| d.atoms()[j].mass).sum() };
    let margin = |r: f64| -> f64 {
        let inside: Vec<usize> = (0..d.len()).filter(|&j| dist(j) <= r).collect();
        let mass: f64 = inside.iter().map(|&j| d.atoms()[j].mass).sum();
        let f: Vec<f64> =
            (0..c).map(|y| inside.iter().map(|&j| d.atoms()[j].mass * freqs[j][y]).sum::<f64>() / mass).collect();
        let lo = top.iter().map(|&y| f[y]).fold(f64::INFINITY, f64::min);
        let hi = (0..c).filter(|y| !top.contains(y)).map(|y| f[y]).fold(f64::NEG_INFINITY, f64::max);
        lo - hi
    };
    // Levels: every ball mass, the cap, and a grid ten times finer than the atom count.
    let mut levels: Vec<f64> = radii.iter().map(|&r| ball_mass(r)).collect();
    levels.push(cap);
    let steps = 10 * d.len() * 10;
    levels.extend((1..=steps).map(|t| t as f64 / steps as f64));
    let mut best = 0.0f64;
    for p in levels.into_iter().filter(|&p| p <= cap && p > 0.0) {
        let r_p = radii.iter().copied().find(|&r| ball_mass(r) >= p - 1e-12).unwrap_or(*radii.last().unwrap());
        let gamma = radii.iter().filter(|&&r| r <= r_p).map(|&r| margin(r)).fold(f64::INFINITY, f64::min);
        if gamma > 0.0 {
            best = best.max(p * gamma * gamma);
        }
    }
    best
}

/// Bayes labels differ on at least one atom.
pub fn bayes_differs(a: &DiscreteDistribution, b: &DiscreteDistribution) -> bool {
    bayes_rule(a) != bayes_rule(b)
}
