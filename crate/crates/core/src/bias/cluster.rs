use std::collections::BTreeMap;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Lloyd's k-means with seeded initialization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KMeans {
    pub k: usize,
    pub seed: u64,
    pub max_iter: usize,
}

impl KMeans {
    pub fn new(k: usize, seed: u64) -> Self {
        Self { k, seed, max_iter: 100 }
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn fit<T: Scalar>(&self, points: &[Vec<T>]) -> Result<KMeansResult<T>> {
        let n = points.len();
        if self.k == 0 {
            return Err(Error::ZeroK);
        }
        if self.k > n {
            return Err(Error::KTooLarge { k: self.k, n });
        }
        let dim = points[0].len();
        for p in points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: p.len() });
            }
        }

        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut seeds = index::sample(&mut rng, n, self.k).into_vec();
        seeds.sort_unstable();
        let mut centroids: Vec<Vec<T>> = seeds.iter().map(|&i| points[i].clone()).collect();

        let mut labels = vec![usize::MAX; n];
        let mut objective_history = Vec::new();
        let mut iterations = 0;
        let mut converged = false;
        while iterations < self.max_iter.max(1) {
            iterations += 1;
            let mut changed = false;
            let mut objective = T::zero();
            for (i, p) in points.iter().enumerate() {
                let (best, dist) = nearest(&centroids, p);
                objective = objective + dist;
                if labels[i] != best {
                    labels[i] = best;
                    changed = true;
                }
            }
            objective_history.push(objective);
            if !changed {
                converged = true;
                break;
            }
            centroids = update(points, &labels, &centroids);
        }

        Ok(KMeansResult { labels, centroids, objective_history, iterations, converged })
    }
}

fn squared_distance<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + (x - y) * (x - y))
}

/// Closest centroid; ties go to the lowest index.
fn nearest<T: Scalar>(centroids: &[Vec<T>], p: &[T]) -> (usize, T) {
    let mut best = 0;
    let mut best_dist = squared_distance(&centroids[0], p);
    for (j, c) in centroids.iter().enumerate().skip(1) {
        let d = squared_distance(c, p);
        if d < best_dist {
            best = j;
            best_dist = d;
        }
    }
    (best, best_dist)
}

/// Mean of each cluster; an empty cluster keeps its previous centroid.
fn update<T: Scalar>(points: &[Vec<T>], labels: &[usize], previous: &[Vec<T>]) -> Vec<Vec<T>> {
    let dim = previous[0].len();
    let mut sums = vec![vec![T::zero(); dim]; previous.len()];
    let mut counts = vec![0usize; previous.len()];
    for (p, &l) in points.iter().zip(labels) {
        counts[l] += 1;
        for (s, &x) in sums[l].iter_mut().zip(p) {
            *s = *s + x;
        }
    }
    sums.into_iter()
        .zip(counts)
        .zip(previous)
        .map(|((sum, count), prev)| {
            if count == 0 {
                prev.clone()
            } else {
                let c = T::from_usize(count).expect("count fits scalar");
                sum.into_iter().map(|s| s / c).collect()
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult<T> {
    /// Cluster index per input point.
    pub labels: Vec<usize>,
    pub centroids: Vec<Vec<T>>,
    /// Within-cluster sum of squares after each assignment step.
    pub objective_history: Vec<T>,
    pub iterations: usize,
    pub converged: bool,
}

impl<T: Scalar> KMeansResult<T> {
    pub fn objective(&self) -> T {
        *self.objective_history.last().expect("at least one iteration")
    }

    /// Group labels (`cluster-<index>`) keyed by candidate id.
    pub fn label_map(&self, ids: &[String]) -> Result<BTreeMap<String, String>> {
        if ids.len() != self.labels.len() {
            return Err(Error::LengthMismatch {
                what: "ids",
                expected: self.labels.len(),
                found: ids.len(),
            });
        }
        Ok(ids
            .iter()
            .zip(&self.labels)
            .map(|(id, l)| (id.clone(), format!("cluster-{l}")))
            .collect())
    }
}

/// Clusters `features` into `k` groups with the default iteration cap.
pub fn cluster_groups<T: Scalar>(features: &[Vec<T>], k: usize, seed: u64) -> Result<KMeansResult<T>> {
    KMeans::new(k, seed).fit(features)
}
