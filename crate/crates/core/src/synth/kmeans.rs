//! Seeded k-means (k-means++ seeding, Lloyd updates, best of several restarts).

use rand::Rng;

use crate::knn::squared_distance;

const MAX_ROUNDS: usize = 100;

/// Cluster assignment of every point, best inertia over `restarts` runs.
pub fn kmeans<R: Rng>(points: &[Vec<f64>], k: usize, restarts: usize, rng: &mut R) -> Vec<usize> {
    let k = k.min(points.len()).max(1);
    let mut best: Option<(f64, Vec<usize>)> = None;
    for _ in 0..restarts.max(1) {
        let (inertia, assign) = lloyd(points, k, rng);
        if best.as_ref().is_none_or(|(b, _)| inertia < *b) {
            best = Some((inertia, assign));
        }
    }
    best.map(|b| b.1).unwrap_or_default()
}

fn seed_centers<R: Rng>(points: &[Vec<f64>], k: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let mut centers = vec![points[rng.random_range(0..points.len())].clone()];
    let mut d2: Vec<f64> = points.iter().map(|p| squared_distance(p, &centers[0])).collect();
    while centers.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut pick = points.len() - 1;
            for (i, &w) in d2.iter().enumerate() {
                if target < w {
                    pick = i;
                    break;
                }
                target -= w;
            }
            pick
        } else {
            rng.random_range(0..points.len())
        };
        centers.push(points[next].clone());
        for (d, p) in d2.iter_mut().zip(points) {
            *d = d.min(squared_distance(p, &centers[centers.len() - 1]));
        }
    }
    centers
}

fn nearest(centers: &[Vec<f64>], p: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (j, c) in centers.iter().enumerate() {
        let d = squared_distance(p, c);
        if d < best.1 {
            best = (j, d);
        }
    }
    best
}

fn lloyd<R: Rng>(points: &[Vec<f64>], k: usize, rng: &mut R) -> (f64, Vec<usize>) {
    let dim = points[0].len();
    let mut centers = seed_centers(points, k, rng);
    let mut assign = vec![usize::MAX; points.len()];
    for _ in 0..MAX_ROUNDS {
        let mut changed = false;
        for (a, p) in assign.iter_mut().zip(points) {
            let (j, _) = nearest(&centers, p);
            if *a != j {
                *a = j;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (&a, p) in assign.iter().zip(points) {
            counts[a] += 1;
            for (s, v) in sums[a].iter_mut().zip(p) {
                *s += v;
            }
        }
        for j in 0..k {
            if counts[j] == 0 {
                // Re-seed an empty cluster at the point farthest from its center.
                let far = (0..points.len())
                    .max_by(|&a, &b| {
                        let da = squared_distance(&points[a], &centers[assign[a]]);
                        let db = squared_distance(&points[b], &centers[assign[b]]);
                        da.total_cmp(&db).then(b.cmp(&a))
                    })
                    .expect("points are nonempty");
                centers[j] = points[far].clone();
            } else {
                centers[j] = sums[j].iter().map(|s| s / counts[j] as f64).collect();
            }
        }
    }
    let inertia = points.iter().map(|p| nearest(&centers, p).1).sum();
    let assign = points.iter().map(|p| nearest(&centers, p).0).collect();
    (inertia, assign)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn separates_well_spaced_blobs() {
        let mut pts = Vec::new();
        for c in 0..3 {
            for i in 0..20 {
                pts.push(vec![c as f64 * 100.0 + (i % 5) as f64 * 0.1, (i / 5) as f64 * 0.1]);
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let assign = kmeans(&pts, 3, 10, &mut rng);
        for c in 0..3 {
            let block = &assign[c * 20..(c + 1) * 20];
            assert!(block.iter().all(|&a| a == block[0]));
        }
        assert_ne!(assign[0], assign[20]);
        assert_ne!(assign[20], assign[40]);
        assert_ne!(assign[0], assign[40]);
    }

    #[test]
    fn deterministic_and_clamped() {
        let pts: Vec<Vec<f64>> = (0..30).map(|i| vec![(i * 7 % 11) as f64, (i * 3 % 5) as f64]).collect();
        let a = kmeans(&pts, 4, 10, &mut ChaCha8Rng::seed_from_u64(1));
        let b = kmeans(&pts, 4, 10, &mut ChaCha8Rng::seed_from_u64(1));
        assert_eq!(a, b);
        let few = kmeans(&pts[..2], 5, 3, &mut ChaCha8Rng::seed_from_u64(1));
        assert!(few.iter().all(|&a| a < 2));
    }
}
