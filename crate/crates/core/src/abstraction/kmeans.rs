//! Weighted Lloyd k-means with k-means++ seeding and seeded restarts.

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{contract, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct ClusterConfig {
    pub k: usize,
    pub max_iterations: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl ClusterConfig {
    pub fn new(k: usize) -> Self {
        ClusterConfig {
            k,
            max_iterations: 100,
            restarts: 3,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Clustering {
    /// Bucket per point; buckets are numbered by ascending center.
    pub assignment: Vec<u32>,
    pub centers: Vec<Vec<f64>>,
    /// Weighted within-cluster sum of squares.
    pub inertia: f64,
    /// Objective after seeding and after each Lloyd iteration of the kept restart.
    pub trace: Vec<f64>,
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(point: &[f64], centers: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (j, c) in centers.iter().enumerate() {
        let d = dist2(point, c);
        if d < best.1 {
            best = (j, d);
        }
    }
    best
}

fn objective(points: &[Vec<f64>], weights: &[f64], centers: &[Vec<f64>], assignment: &[usize]) -> f64 {
    points
        .iter()
        .zip(weights)
        .zip(assignment)
        .map(|((p, w), &j)| w * dist2(p, &centers[j]))
        .sum()
}

fn seed_centers<R: Rng>(points: &[Vec<f64>], weights: &[f64], k: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let first = WeightedIndex::new(weights).map(|d| d.sample(rng)).unwrap_or(0);
    let mut centers = vec![points[first].clone()];
    let mut d2: Vec<f64> = points.iter().map(|p| dist2(p, &centers[0])).collect();
    while centers.len() < k {
        let mass: Vec<f64> = d2.iter().zip(weights).map(|(d, w)| d * w).collect();
        // every point already sits on a center: the remaining buckets stay empty
        let Ok(dist) = WeightedIndex::new(&mass) else { break };
        let next = points[dist.sample(rng)].clone();
        for (d, p) in d2.iter_mut().zip(points) {
            *d = d.min(dist2(p, &next));
        }
        centers.push(next);
    }
    while centers.len() < k {
        centers.push(centers[0].clone());
    }
    centers
}

fn lloyd(points: &[Vec<f64>], weights: &[f64], mut centers: Vec<Vec<f64>>, max_iterations: usize) -> (Vec<usize>, Vec<Vec<f64>>, Vec<f64>) {
    let k = centers.len();
    let dim = points[0].len();
    let mut assignment: Vec<usize> = points.iter().map(|p| nearest(p, &centers).0).collect();
    let mut trace = vec![objective(points, weights, &centers, &assignment)];
    for _ in 0..max_iterations {
        let mut sum = vec![vec![0.0; dim]; k];
        let mut mass = vec![0.0; k];
        for ((p, w), &j) in points.iter().zip(weights).zip(&assignment) {
            mass[j] += w;
            for (s, x) in sum[j].iter_mut().zip(p) {
                *s += w * x;
            }
        }
        for j in 0..k {
            if mass[j] > 0.0 {
                centers[j] = sum[j].iter().map(|s| s / mass[j]).collect();
            }
        }
        // an empty bucket takes over the point costing its cluster the most
        for j in 0..k {
            if mass[j] > 0.0 {
                continue;
            }
            let worst = (0..points.len())
                .filter(|&i| mass[assignment[i]] > weights[i])
                .map(|i| (i, weights[i] * dist2(&points[i], &centers[assignment[i]])))
                .filter(|&(_, c)| c > 0.0)
                .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)));
            if let Some((i, _)) = worst {
                mass[assignment[i]] -= weights[i];
                mass[j] = weights[i];
                centers[j] = points[i].clone();
                assignment[i] = j;
            }
        }
        let next: Vec<usize> = points
            .iter()
            .zip(&assignment)
            .map(|(p, &cur)| {
                let (j, d) = nearest(p, &centers);
                // keep the current bucket on ties so the objective cannot go up
                if dist2(p, &centers[cur]) <= d {
                    cur
                } else {
                    j
                }
            })
            .collect();
        let changed = next != assignment;
        assignment = next;
        trace.push(objective(points, weights, &centers, &assignment));
        if !changed {
            break;
        }
    }
    (assignment, centers, trace)
}

/// Best-of-restarts weighted k-means. `weights` defaults to 1 per point.
pub fn kmeans(points: &[Vec<f64>], weights: Option<&[f64]>, config: &ClusterConfig) -> Result<Clustering> {
    if config.k == 0 {
        return contract("k must be at least 1");
    }
    if points.is_empty() {
        return contract("nothing to cluster");
    }
    let dim = points[0].len();
    if points.iter().any(|p| p.len() != dim || p.iter().any(|x| !x.is_finite())) {
        return contract("features must be finite and of equal length");
    }
    let ones = vec![1.0; points.len()];
    let weights = weights.unwrap_or(&ones);
    if weights.len() != points.len() || weights.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
        return contract("weights must be positive, one per point");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut best: Option<(Vec<usize>, Vec<Vec<f64>>, Vec<f64>)> = None;
    for _ in 0..config.restarts.max(1) {
        let centers = seed_centers(points, weights, config.k, &mut rng);
        let run = lloyd(points, weights, centers, config.max_iterations);
        let better = match &best {
            Some(b) => run.2.last() < b.2.last(),
            None => true,
        };
        if better {
            best = Some(run);
        }
    }
    let (assignment, centers, trace) = best.expect("at least one restart");
    let mut order: Vec<usize> = (0..centers.len()).collect();
    order.sort_by(|&a, &b| {
        centers[a]
            .iter()
            .zip(&centers[b])
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(a.cmp(&b))
    });
    let mut label = vec![0u32; centers.len()];
    for (new, &old) in order.iter().enumerate() {
        label[old] = new as u32;
    }
    Ok(Clustering {
        assignment: assignment.iter().map(|&j| label[j]).collect(),
        inertia: *trace.last().expect("nonempty trace"),
        centers: order.iter().map(|&j| centers[j].clone()).collect(),
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_d(values: &[f64]) -> Vec<Vec<f64>> {
        values.iter().map(|v| vec![*v]).collect()
    }

    #[test]
    fn toy_set_splits_low_and_high() {
        let c = kmeans(&one_d(&[0.0, 0.1, 0.9, 1.0]), None, &ClusterConfig::new(2)).unwrap();
        assert_eq!(c.assignment, vec![0, 0, 1, 1]);
    }

    #[test]
    fn one_bucket_holds_everything() {
        let c = kmeans(&one_d(&[0.3, 0.2, 0.9]), None, &ClusterConfig::new(1)).unwrap();
        assert_eq!(c.assignment, vec![0, 0, 0]);
    }

    #[test]
    fn k_equal_to_distinct_values_has_zero_inertia() {
        let pts = one_d(&[0.5, 0.1, 0.5, 0.7, 0.1, 0.7, 0.3]);
        let c = kmeans(&pts, None, &ClusterConfig::new(4)).unwrap();
        assert_eq!(c.inertia, 0.0);
    }

    #[test]
    fn more_buckets_than_values_is_not_an_error() {
        let c = kmeans(&one_d(&[0.2, 0.2, 0.8]), None, &ClusterConfig::new(5)).unwrap();
        assert_eq!(c.inertia, 0.0);
        assert_eq!(c.centers.len(), 5);
    }

    #[test]
    fn rejects_zero_k_and_bad_input() {
        assert!(kmeans(&one_d(&[0.1]), None, &ClusterConfig::new(0)).is_err());
        assert!(kmeans(&one_d(&[f64::NAN]), None, &ClusterConfig::new(1)).is_err());
    }
}
