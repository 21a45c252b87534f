//! CodeBook construction by spherical k-means with k-means++ seeding.
//!
//! Inputs are L2-normalized, points join the centroid with the highest
//! cosine similarity, and each centroid is the re-normalized mean of its
//! members. The objective is the total cosine distance `Σ (1 - cos)`.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng as _;

use crate::math::{dot, normalized, Fnv64};
use crate::rng;
use crate::tokenizer::Action;
use crate::vectorize::ActionVector;
use crate::{Error, Result};

impl AsRef<[f64]> for ActionVector {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}

/// Keeps the first occurrence of each distinct action, preserving order.
pub fn dedup_actions(actions: &[Action]) -> Vec<Action> {
    let mut seen = BTreeSet::new();
    actions
        .iter()
        .filter(|a| seen.insert(*a))
        .cloned()
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansParams {
    pub k: usize,
    pub seed: u64,
    pub max_iter: usize,
    pub tol: f64,
    pub restarts: usize,
}

impl KMeansParams {
    pub fn new(k: usize, seed: u64) -> Self {
        KMeansParams {
            k,
            seed,
            max_iter: 300,
            tol: 1e-6,
            restarts: 10,
        }
    }
}

/// Provenance of a CodeBook.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fingerprint {
    /// FNV-1a over the bits of the clustered vectors.
    pub corpus_hash: u64,
    pub seed: u64,
    /// Lloyd iterations of the winning restart.
    pub iterations: u32,
}

/// `k` unit-norm centroids.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeBook {
    dim: usize,
    centroids: Vec<f64>,
    pub fingerprint: Fingerprint,
}

impl CodeBook {
    /// Validates shape, finiteness and unit norm (within 1e-9) of every row.
    pub fn from_parts(dim: usize, centroids: Vec<f64>, fingerprint: Fingerprint) -> Result<Self> {
        if dim == 0 || centroids.is_empty() || !centroids.len().is_multiple_of(dim) {
            return Err(Error::Config("codebook matrix is empty or ragged".into()));
        }
        for row in centroids.chunks_exact(dim) {
            let n = dot(row, row);
            if !n.is_finite() || (libm::sqrt(n) - 1.0).abs() > 1e-9 {
                return Err(Error::Degenerate("codebook centroid is not unit norm".into()));
            }
        }
        Ok(CodeBook {
            dim,
            centroids,
            fingerprint,
        })
    }

    pub fn k(&self) -> usize {
        self.centroids.len() / self.dim
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn centroid(&self, i: usize) -> &[f64] {
        &self.centroids[i * self.dim..(i + 1) * self.dim]
    }

    pub fn centroids(&self) -> &[f64] {
        &self.centroids
    }

    /// Index of the most cosine-similar centroid; ties go to the lower index.
    pub fn assign(&self, v: &[f64]) -> Result<usize> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: v.len(),
            });
        }
        if v.iter().all(|&x| x == 0.0) {
            return Err(Error::Degenerate("cannot assign the zero vector".into()));
        }
        // Centroids are unit norm, so the dot product ranks like cosine.
        Ok(nearest(self.centroids.chunks_exact(self.dim), v).0)
    }
}

fn nearest<'a>(centroids: impl Iterator<Item = &'a [f64]>, v: &[f64]) -> (usize, f64) {
    let mut best = (0usize, f64::NEG_INFINITY);
    for (i, c) in centroids.enumerate() {
        let s = dot(c, v);
        if s > best.1 {
            best = (i, s);
        }
    }
    best
}

/// Result of clustering: the CodeBook plus diagnostics of the winning run.
#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    pub codebook: CodeBook,
    pub assignments: Vec<usize>,
    pub objective: f64,
    /// Objective after every assignment step of the winning run.
    pub history: Vec<f64>,
}

struct Run {
    centroids: Vec<f64>,
    assignments: Vec<usize>,
    history: Vec<f64>,
    iterations: u32,
}

/// Total cosine distance of normalized points to their assigned centroids.
pub fn objective(points: &[Vec<f64>], centroids: &[f64], assignments: &[usize]) -> f64 {
    let dim = points.first().map_or(1, Vec::len);
    points
        .iter()
        .zip(assignments)
        .map(|(p, &a)| 1.0 - dot(p, &centroids[a * dim..(a + 1) * dim]))
        .sum()
}

fn seed_plus_plus(points: &[Vec<f64>], k: usize, r: &mut rng::Rng) -> Vec<f64> {
    let n = points.len();
    let dim = points[0].len();
    let mut centroids = Vec::with_capacity(k * dim);
    let first = r.random_range(0..n);
    centroids.extend_from_slice(&points[first]);
    let mut dist: Vec<f64> = points
        .iter()
        .map(|p| (1.0 - dot(p, &points[first])).max(0.0))
        .collect();
    for _ in 1..k {
        let weights: Vec<f64> = dist.iter().map(|d| d * d).collect();
        let total: f64 = weights.iter().sum();
        let pick = if total > 0.0 {
            let mut x = r.random::<f64>() * total;
            let mut chosen = n - 1;
            for (i, w) in weights.iter().enumerate() {
                if x < *w {
                    chosen = i;
                    break;
                }
                x -= w;
            }
            chosen
        } else {
            r.random_range(0..n)
        };
        centroids.extend_from_slice(&points[pick]);
        for (d, p) in dist.iter_mut().zip(points) {
            *d = d.min((1.0 - dot(p, &points[pick])).max(0.0));
        }
    }
    centroids
}

fn assign_all(points: &[Vec<f64>], centroids: &[f64], dim: usize, out: &mut [usize]) -> bool {
    let mut changed = false;
    for (p, a) in points.iter().zip(out.iter_mut()) {
        let (best, _) = nearest(centroids.chunks_exact(dim), p);
        if best != *a {
            *a = best;
            changed = true;
        }
    }
    changed
}

/// Moves each non-empty centroid to its members' normalized mean and
/// returns the member counts.
fn update_centroids(points: &[Vec<f64>], assignments: &[usize], centroids: &mut [f64], k: usize) -> Vec<usize> {
    let dim = points[0].len();
    let mut sums = vec![0.0f64; k * dim];
    let mut counts = vec![0usize; k];
    for (p, &a) in points.iter().zip(assignments) {
        counts[a] += 1;
        sums[a * dim..(a + 1) * dim]
            .iter_mut()
            .zip(p)
            .for_each(|(s, x)| *s += x);
    }
    for c in 0..k {
        if counts[c] == 0 {
            continue;
        }
        // A zero mean leaves every direction equally good; keep the old one.
        if let Some(n) = normalized(&sums[c * dim..(c + 1) * dim]) {
            centroids[c * dim..(c + 1) * dim].copy_from_slice(&n);
        }
    }
    counts
}

fn lloyd(points: &[Vec<f64>], mut centroids: Vec<f64>, params: &KMeansParams) -> Run {
    let dim = points[0].len();
    let mut assignments = vec![usize::MAX; points.len()];
    assign_all(points, &centroids, dim, &mut assignments);
    let mut history = vec![objective(points, &centroids, &assignments)];
    let mut iterations = descend(points, &mut centroids, &mut assignments, &mut history, params);
    // Lloyd stalls in partitions that a single point move still improves;
    // take the best such move and descend again until none is left.
    for _ in 0..params.max_iter {
        let Some((i, c)) = best_move(points, &assignments, params.k) else {
            break;
        };
        assignments[i] = c;
        update_centroids(points, &assignments, &mut centroids, params.k);
        history.push(objective(points, &centroids, &assignments));
        iterations += descend(points, &mut centroids, &mut assignments, &mut history, params);
    }
    Run {
        centroids,
        assignments,
        history,
        iterations,
    }
}

/// Lloyd iterations from the current assignment. Returns the number run.
fn descend(
    points: &[Vec<f64>],
    centroids: &mut [f64],
    assignments: &mut [usize],
    history: &mut Vec<f64>,
    params: &KMeansParams,
) -> u32 {
    let k = params.k;
    let dim = points[0].len();
    let mut iterations = 0;
    let mut settled = false;
    for _ in 0..params.max_iter {
        iterations += 1;
        let old = centroids.to_vec();
        let mut counts = update_centroids(points, assignments, centroids, k);
        // Empty clusters take the point farthest from its own centroid,
        // among clusters that can spare a member.
        for c in 0..k {
            if counts[c] != 0 {
                continue;
            }
            let mut best: Option<(usize, f64)> = None;
            for (i, (p, &a)) in points.iter().zip(assignments.iter()).enumerate() {
                if counts[a] < 2 {
                    continue;
                }
                let d = 1.0 - dot(p, &centroids[a * dim..(a + 1) * dim]);
                if best.is_none_or(|(_, bd)| d > bd) {
                    best = Some((i, d));
                }
            }
            if let Some((i, _)) = best {
                counts[assignments[i]] -= 1;
                assignments[i] = c;
                counts[c] = 1;
                centroids[c * dim..(c + 1) * dim].copy_from_slice(&points[i]);
            }
        }
        let movement = centroids
            .chunks_exact(dim)
            .zip(old.chunks_exact(dim))
            .map(|(a, b)| libm::sqrt(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()))
            .fold(0.0, f64::max);
        let changed = assign_all(points, centroids, dim, assignments);
        history.push(objective(points, centroids, assignments));
        settled = !changed;
        if !changed || movement < params.tol {
            break;
        }
    }
    if !settled {
        // Stopped with fresh assignments: move centroids to their means so
        // the reported objective belongs to a consistent solution.
        update_centroids(points, assignments, centroids, k);
        history.push(objective(points, centroids, assignments));
    }
    iterations
}

/// The single reassignment that lowers the objective most, if any does.
/// With centroids at normalized means a cluster costs |C| - |sum C|, so a
/// move only changes the norms of two sums.
fn best_move(points: &[Vec<f64>], assignments: &[usize], k: usize) -> Option<(usize, usize)> {
    let dim = points[0].len();
    let mut sums = vec![0.0f64; k * dim];
    let mut counts = vec![0usize; k];
    for (p, &a) in points.iter().zip(assignments) {
        counts[a] += 1;
        sums[a * dim..(a + 1) * dim]
            .iter_mut()
            .zip(p)
            .for_each(|(s, x)| *s += x);
    }
    let norm = |v: &[f64]| libm::sqrt(v.iter().map(|x| x * x).sum());
    let norms: Vec<f64> = sums.chunks_exact(dim).map(norm).collect();
    let mut best: Option<(usize, usize, f64)> = None;
    let mut buf = vec![0.0f64; dim];
    for (i, (p, &a)) in points.iter().zip(assignments).enumerate() {
        if counts[a] < 2 {
            continue;
        }
        for (b, (s, x)) in buf.iter_mut().zip(sums[a * dim..(a + 1) * dim].iter().zip(p)) {
            *b = s - x;
        }
        let leave = norms[a] - norm(&buf);
        for c in (0..k).filter(|&c| c != a) {
            for (b, (s, x)) in buf.iter_mut().zip(sums[c * dim..(c + 1) * dim].iter().zip(p)) {
                *b = s + x;
            }
            let gain = norm(&buf) - norms[c] - leave;
            if gain > 1e-12 && best.is_none_or(|(_, _, g)| gain > g) {
                best = Some((i, c, gain));
            }
        }
    }
    best.map(|(i, c, _)| (i, c))
}

/// Clusters `vectors` into `params.k` groups, keeping the best of
/// `params.restarts` seeded runs.
pub fn build_codebook<V: AsRef<[f64]>>(vectors: &[V], params: &KMeansParams) -> Result<Clustering> {
    let k = params.k;
    if k == 0 {
        return Err(Error::Config("k must be at least 1".into()));
    }
    if vectors.len() < k {
        return Err(Error::TooFewPoints { n: vectors.len(), k });
    }
    let dim = vectors[0].as_ref().len();
    let mut hash = Fnv64::default();
    let mut points = Vec::with_capacity(vectors.len());
    for v in vectors {
        let v = v.as_ref();
        if v.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: v.len() });
        }
        for x in v {
            hash.write(&x.to_bits().to_le_bytes());
        }
        points.push(normalized(v).ok_or_else(|| Error::Degenerate("cannot cluster a zero vector".into()))?);
    }

    let mut best: Option<(f64, Run)> = None;
    for restart in 0..params.restarts.max(1) {
        let mut r = rng::stream(params.seed, restart as u64);
        let init = seed_plus_plus(&points, k, &mut r);
        let run = lloyd(&points, init, params);
        let obj = *run.history.last().expect("history is never empty");
        if best.as_ref().is_none_or(|(b, _)| obj < *b) {
            best = Some((obj, run));
        }
    }
    let (obj, run) = best.expect("at least one restart");
    let codebook = CodeBook::from_parts(
        dim,
        run.centroids,
        Fingerprint {
            corpus_hash: hash.finish(),
            seed: params.seed,
            iterations: run.iterations,
        },
    )?;
    Ok(Clustering {
        codebook,
        assignments: run.assignments,
        objective: obj,
        history: run.history,
    })
}

/// Length statistics of one cluster.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterRow {
    pub cluster: usize,
    pub max: usize,
    pub mean: f64,
    /// Population variance.
    pub variance: f64,
    pub count: usize,
}

/// Per-cluster action-length statistics sorted by max length.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterStats {
    pub rows: Vec<ClusterRow>,
}

/// Computes max, mean and variance of the unit count of the actions in each
/// of the `k` clusters. Rows are ordered by max length, then cluster index.
pub fn cluster_stats(actions: &[Action], assignments: &[usize], k: usize) -> Result<ClusterStats> {
    if actions.len() != assignments.len() {
        return Err(Error::DimensionMismatch {
            expected: actions.len(),
            found: assignments.len(),
        });
    }
    if let Some(&bad) = assignments.iter().find(|&&a| a >= k) {
        return Err(Error::Config(alloc::format!("cluster index {bad} out of range for k={k}")));
    }
    let mut lengths: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (a, &c) in actions.iter().zip(assignments) {
        lengths[c].push(a.len());
    }
    let mut rows: Vec<ClusterRow> = lengths
        .iter()
        .enumerate()
        .map(|(cluster, ls)| {
            let count = ls.len();
            if count == 0 {
                return ClusterRow { cluster, max: 0, mean: 0.0, variance: 0.0, count };
            }
            let n = count as f64;
            let mean = ls.iter().sum::<usize>() as f64 / n;
            let variance = ls.iter().map(|&l| (l as f64 - mean) * (l as f64 - mean)).sum::<f64>() / n;
            ClusterRow {
                cluster,
                max: *ls.iter().max().unwrap_or(&0),
                mean,
                variance,
                count,
            }
        })
        .collect();
    rows.sort_by_key(|r| (r.max, r.cluster));
    Ok(ClusterStats { rows })
}
