//! Lloyd's k-means with k-means++ seeding on row-major point matrices.
//!
//! Point-wise work runs in parallel; every sum is reduced in point order so
//! the result depends only on the inputs and the RNG stream.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct KMeansResult {
    /// `k * dim` centroid coordinates.
    pub centroids: Vec<f64>,
    pub assignments: Vec<usize>,
    /// Objective (sum of squared distances) after each assignment step.
    pub objective_history: Vec<f64>,
}

#[inline]
pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Index of the nearest centroid; ties go to the lowest index.
pub fn nearest(point: &[f64], centroids: &[f64], dim: usize) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (j, c) in centroids.chunks_exact(dim).enumerate() {
        let d = squared_distance(point, c);
        if d < best.1 {
            best = (j, d);
        }
    }
    best
}

pub fn kmeans<R: Rng>(
    points: &[f64],
    dim: usize,
    k: usize,
    max_iter: usize,
    tol: f64,
    rng: &mut R,
) -> Result<KMeansResult> {
    assert!(dim > 0 && points.len().is_multiple_of(dim));
    let n = points.len() / dim;
    if k == 0 {
        return Err(Error::Invalid("k must be positive".into()));
    }
    if n < k {
        return Err(Error::InsufficientPatterns {
            order: 0,
            available: n,
            needed: k,
        });
    }
    let mut centroids = plus_plus_seeds(points, dim, k, rng);
    let mut history = Vec::new();
    let mut assignments = vec![0usize; n];

    for _ in 0..max_iter.max(1) {
        let assigned: Vec<(usize, f64)> = points
            .par_chunks_exact(dim)
            .map(|p| nearest(p, &centroids, dim))
            .collect();
        let objective: f64 = assigned.iter().map(|a| a.1).sum();
        for (slot, a) in assignments.iter_mut().zip(&assigned) {
            *slot = a.0;
        }
        let converged = history
            .last()
            .is_some_and(|&prev: &f64| prev - objective <= tol * prev.abs().max(f64::MIN_POSITIVE));
        history.push(objective);
        if converged {
            break;
        }

        let mut sums = vec![0.0; k * dim];
        let mut counts = vec![0usize; k];
        for (p, &j) in points.chunks_exact(dim).zip(&assignments) {
            counts[j] += 1;
            for (s, v) in sums[j * dim..(j + 1) * dim].iter_mut().zip(p) {
                *s += v;
            }
        }
        for j in 0..k {
            // Empty clusters keep their previous centroid.
            if counts[j] > 0 {
                let inv = counts[j] as f64;
                for d in 0..dim {
                    centroids[j * dim + d] = sums[j * dim + d] / inv;
                }
            }
        }
    }

    Ok(KMeansResult {
        centroids,
        assignments,
        objective_history: history,
    })
}

fn plus_plus_seeds<R: Rng>(points: &[f64], dim: usize, k: usize, rng: &mut R) -> Vec<f64> {
    let n = points.len() / dim;
    let mut chosen = Vec::with_capacity(k);
    chosen.push(rng.gen_range(0..n));
    let mut d2: Vec<f64> = points
        .par_chunks_exact(dim)
        .map(|p| squared_distance(p, &points[chosen[0] * dim..(chosen[0] + 1) * dim]))
        .collect();
    while chosen.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.gen::<f64>() * total;
            let mut pick = n - 1;
            for (i, &d) in d2.iter().enumerate() {
                if d > 0.0 && target < d {
                    pick = i;
                    break;
                }
                target -= d;
            }
            // Guard against rounding landing on a zero-weight tail.
            while d2[pick] == 0.0 {
                pick -= 1;
            }
            pick
        } else {
            // Fewer distinct points than k: take the first unused index.
            (0..n).find(|i| !chosen.contains(i)).unwrap()
        };
        chosen.push(next);
        let c = &points[next * dim..(next + 1) * dim];
        d2.par_iter_mut()
            .zip(points.par_chunks_exact(dim))
            .for_each(|(d, p)| *d = d.min(squared_distance(p, c)));
    }
    chosen
        .iter()
        .flat_map(|&i| points[i * dim..(i + 1) * dim].iter().copied())
        .collect()
}
