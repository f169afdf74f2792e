use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{squared_distance, KnowledgeStore};

pub const MAX_ITERATIONS: usize = 100;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ClusterError {
    #[error("need at least {k} points, got {n}")]
    TooFewPoints { n: usize, k: usize },
    #[error("k must be positive")]
    ZeroK,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Clustering {
    pub k: usize,
    /// Cluster index of every input point.
    pub assignments: Vec<usize>,
    /// Per cluster, the index of the member nearest the centroid.
    pub exemplars: Vec<usize>,
    pub exemplar_ids: Vec<String>,
    pub centroids: Vec<Vec<f64>>,
    /// Total within-cluster squared error after each iteration.
    pub sse_history: Vec<f64>,
    pub iterations: usize,
}

impl Clustering {
    pub fn members(&self, cluster: usize) -> Vec<usize> {
        (0..self.assignments.len())
            .filter(|&i| self.assignments[i] == cluster)
            .collect()
    }
}

/// Clusters the store's vectors; ids are the pair ids.
pub fn kmeans(store: &KnowledgeStore, k: usize, seed: u64) -> Result<Clustering, ClusterError> {
    let ids: Vec<String> = store.pairs().iter().map(|p| p.id.clone()).collect();
    kmeans_points(store.vectors(), &ids, k, seed)
}

/// Lloyd iterations from a seeded k-means++ start.
pub fn kmeans_points(points: &[Vec<f64>], ids: &[String], k: usize, seed: u64) -> Result<Clustering, ClusterError> {
    let n = points.len();
    if k == 0 {
        return Err(ClusterError::ZeroK);
    }
    if n < k {
        return Err(ClusterError::TooFewPoints { n, k });
    }
    assert_eq!(ids.len(), n, "one id per point");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = init_plus_plus(points, k, &mut rng);

    let mut assignments = vec![usize::MAX; n];
    let mut sse_history = Vec::new();
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let next: Vec<usize> = points.iter().map(|p| nearest(&centroids, p)).collect();
        let changed = next != assignments;
        assignments = next;
        reseed_empty(points, &mut assignments, &centroids, k);
        centroids = means(points, &assignments, k);
        sse_history.push(sse(points, &assignments, &centroids));
        if !changed {
            break;
        }
    }

    let exemplars: Vec<usize> = (0..k)
        .map(|c| {
            (0..n)
                .filter(|&i| assignments[i] == c)
                .min_by(|&a, &b| {
                    squared_distance(&points[a], &centroids[c])
                        .total_cmp(&squared_distance(&points[b], &centroids[c]))
                        .then_with(|| ids[a].cmp(&ids[b]))
                })
                .expect("clusters are non-empty")
        })
        .collect();
    Ok(Clustering {
        k,
        assignments,
        exemplar_ids: exemplars.iter().map(|&i| ids[i].clone()).collect(),
        exemplars,
        centroids,
        sse_history,
        iterations,
    })
}

fn init_plus_plus(points: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = points.len();
    let mut chosen = vec![rng.random_range(0..n)];
    let mut d2: Vec<f64> = points.iter().map(|p| squared_distance(p, &points[chosen[0]])).collect();
    while chosen.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut pick = None;
            for (i, &w) in d2.iter().enumerate() {
                if w > 0.0 {
                    pick = Some(i);
                    if target < w {
                        break;
                    }
                    target -= w;
                }
            }
            pick.expect("positive total weight")
        } else {
            // Only duplicates remain: draw uniformly among unchosen points.
            let rest: Vec<usize> = (0..n).filter(|i| !chosen.contains(i)).collect();
            rest[rng.random_range(0..rest.len())]
        };
        chosen.push(pick);
        for (i, p) in points.iter().enumerate() {
            d2[i] = d2[i].min(squared_distance(p, &points[pick]));
        }
    }
    chosen.into_iter().map(|i| points[i].clone()).collect()
}

fn nearest(centroids: &[Vec<f64>], p: &[f64]) -> usize {
    let mut best = (f64::INFINITY, 0);
    for (c, centroid) in centroids.iter().enumerate() {
        let d = squared_distance(p, centroid);
        if d < best.0 {
            best = (d, c);
        }
    }
    best.1
}

/// Moves the point farthest from its centroid into each empty cluster.
fn reseed_empty(points: &[Vec<f64>], assignments: &mut [usize], centroids: &[Vec<f64>], k: usize) {
    for c in 0..k {
        if assignments.contains(&c) {
            continue;
        }
        let mut sizes = vec![0usize; k];
        for &a in assignments.iter() {
            sizes[a] += 1;
        }
        let donor = (0..points.len())
            .filter(|&i| sizes[assignments[i]] > 1)
            .max_by(|&a, &b| {
                let da = squared_distance(&points[a], &centroids[assignments[a]]);
                let db = squared_distance(&points[b], &centroids[assignments[b]]);
                da.total_cmp(&db).then(b.cmp(&a))
            })
            .expect("n >= k leaves a cluster with spare members");
        assignments[donor] = c;
    }
}

fn means(points: &[Vec<f64>], assignments: &[usize], k: usize) -> Vec<Vec<f64>> {
    let dim = points[0].len();
    let mut sums = vec![vec![0.0; dim]; k];
    let mut counts = vec![0usize; k];
    for (p, &a) in points.iter().zip(assignments) {
        counts[a] += 1;
        for (s, x) in sums[a].iter_mut().zip(p) {
            *s += x;
        }
    }
    for (s, &c) in sums.iter_mut().zip(&counts) {
        s.iter_mut().for_each(|x| *x /= c as f64);
    }
    sums
}

fn sse(points: &[Vec<f64>], assignments: &[usize], centroids: &[Vec<f64>]) -> f64 {
    points
        .iter()
        .zip(assignments)
        .map(|(p, &a)| squared_distance(p, &centroids[a]))
        .sum()
}
