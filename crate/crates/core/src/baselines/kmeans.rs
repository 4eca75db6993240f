use std::cmp::Ordering;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{Assignment, Instance};
use crate::scalar::Scalar;

pub const KMEANS_MAX_ITERS: usize = 100;
pub const KMEANS_TOLERANCE: f64 = 1e-6;

fn sq_dist<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum()
}

/// Nearest-centroid assignment where cluster sizes may differ by at most one.
///
/// Every cluster holds `n / c` points, and `n % c` of them one more. Points
/// with the most to lose (largest gap between their nearest and second-nearest
/// centroid) choose first.
fn assign_balanced<T: Scalar>(points: &[&[T]], centroids: &[Vec<T>]) -> Vec<usize> {
    let (n, c) = (points.len(), centroids.len());
    let floor = n / c;
    let mut extras = n % c;
    let ranked: Vec<Vec<(T, usize)>> = points
        .iter()
        .map(|p| {
            let mut d: Vec<(T, usize)> = centroids
                .iter()
                .enumerate()
                .map(|(j, cen)| (sq_dist(p, cen).sqrt(), j))
                .collect();
            d.sort_by(|a, b| {
                a.0.partial_cmp(&b.0)
                    .unwrap_or(Ordering::Equal)
                    .then(a.1.cmp(&b.1))
            });
            d
        })
        .collect();
    let gap = |i: usize| {
        let r = &ranked[i];
        if r.len() > 1 {
            r[1].0 - r[0].0
        } else {
            T::zero()
        }
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        gap(b)
            .partial_cmp(&gap(a))
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });

    let mut sizes = vec![0usize; c];
    let mut labels = vec![0; n];
    for i in order {
        for &(_, j) in &ranked[i] {
            if sizes[j] < floor || (sizes[j] == floor && extras > 0) {
                if sizes[j] == floor {
                    extras -= 1;
                }
                sizes[j] += 1;
                labels[i] = j;
                break;
            }
        }
    }
    labels
}

/// k-means++ seeding: each new centroid is a point drawn with probability
/// proportional to its squared distance to the nearest chosen centroid.
fn plus_plus_seeds<T: Scalar>(
    points: &[&[T]],
    clusters: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<Vec<T>> {
    let n = points.len();
    let mut chosen = vec![false; n];
    let first = rng.random_range(0..n);
    chosen[first] = true;
    let mut centroids = vec![points[first].to_vec()];
    let mut nearest: Vec<f64> = points
        .iter()
        .map(|p| sq_dist(p, points[first]).as_f64())
        .collect();
    while centroids.len() < clusters {
        let total: f64 = (0..n).filter(|&i| !chosen[i]).map(|i| nearest[i]).sum();
        let pick = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut pick = None;
            for i in (0..n).filter(|&i| !chosen[i]) {
                pick = Some(i);
                target -= nearest[i];
                if target < 0.0 {
                    break;
                }
            }
            pick.expect("an unchosen point remains")
        } else {
            // all remaining points coincide with centroids
            let free: Vec<usize> = (0..n).filter(|&i| !chosen[i]).collect();
            free[rng.random_range(0..free.len())]
        };
        chosen[pick] = true;
        centroids.push(points[pick].to_vec());
        for (i, d) in nearest.iter_mut().enumerate() {
            *d = d.min(sq_dist(points[i], points[pick]).as_f64());
        }
    }
    centroids
}

/// Lloyd iterations with size-balanced assignment. Returns a cluster label
/// per point; cluster sizes differ by at most one.
pub fn balanced_kmeans<T: Scalar>(points: &[&[T]], clusters: usize, seed: u64) -> Vec<usize> {
    let n = points.len();
    assert!(
        clusters >= 1 && clusters <= n,
        "need 1 <= clusters <= points"
    );
    let dims = points[0].len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = plus_plus_seeds(points, clusters, &mut rng);
    let tol = T::of_f64(KMEANS_TOLERANCE);
    let mut labels = assign_balanced(points, &centroids);
    for _ in 0..KMEANS_MAX_ITERS {
        let mut next = vec![vec![T::zero(); dims]; clusters];
        let mut counts = vec![0usize; clusters];
        for (p, &l) in points.iter().zip(&labels) {
            counts[l] += 1;
            for (acc, &v) in next[l].iter_mut().zip(p.iter()) {
                *acc += v;
            }
        }
        for (cen, &cnt) in next.iter_mut().zip(&counts) {
            let cnt = T::of_usize(cnt.max(1));
            cen.iter_mut().for_each(|v| *v /= cnt);
        }
        let shift = centroids
            .iter()
            .zip(&next)
            .map(|(a, b)| sq_dist(a, b).sqrt())
            .fold(T::zero(), T::max);
        centroids = next;
        labels = assign_balanced(points, &centroids);
        if shift < tol {
            break;
        }
    }
    labels
}

/// Uniform k-means teams: `ceil(n / L)` balanced clusters of similar students,
/// each dealt across the `L` teams in random order so that every team gets at
/// most one member of each cluster.
pub fn uniform_kmeans<T: Scalar>(
    instance: &Instance<T>,
    team_count: usize,
    seed: u64,
) -> Result<Assignment> {
    let n = instance.n();
    if team_count == 0 || team_count > n {
        return Err(Error::TeamCount {
            teams: team_count,
            students: n,
        });
    }
    let clusters = n.div_ceil(team_count);
    let points: Vec<&[T]> = (0..n).map(|i| instance.skill(i)).collect();
    let labels = balanced_kmeans(&points, clusters, seed);
    let mut groups = vec![Vec::new(); clusters];
    for (i, &c) in labels.iter().enumerate() {
        groups[c].push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(0x9e37_79b9_7f4a_7c15));
    let mut teams = vec![0; n];
    let mut next_team = 0;
    for mut members in groups {
        members.shuffle(&mut rng);
        for i in members {
            teams[i] = next_team % team_count;
            next_team += 1;
        }
    }
    Assignment::new(teams)
}
