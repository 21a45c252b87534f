use alloc::vec::Vec;

use super::{KnnParams, Weighting};

/// k-nearest-neighbour vote under Euclidean distance.
#[derive(Debug, Clone)]
pub struct KnnClassifier {
    params: KnnParams,
    features: Vec<Vec<f64>>,
    labels: Vec<bool>,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

impl KnnClassifier {
    pub fn fit(params: &KnnParams, features: &[Vec<f64>], labels: &[bool]) -> Self {
        KnnClassifier {
            params: *params,
            features: features.to_vec(),
            labels: labels.to_vec(),
        }
    }

    pub fn dim(&self) -> usize {
        self.features.first().map_or(0, Vec::len)
    }

    /// Neighbours are ranked by distance, then training order. With inverse
    /// distance weighting, exact matches outvote everything else.
    pub fn predict(&self, x: &[f64]) -> bool {
        let mut ranked: Vec<(f64, usize)> = self
            .features
            .iter()
            .enumerate()
            .map(|(i, f)| (sq_dist(f, x), i))
            .collect();
        ranked.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        ranked.truncate(self.params.neighbors.min(ranked.len()));

        let (mut pos, mut neg) = (0.0f64, 0.0f64);
        let exact = ranked.iter().any(|&(d, _)| d == 0.0);
        for &(d, i) in &ranked {
            let w = match self.params.weighting {
                Weighting::Uniform => 1.0,
                Weighting::InverseDistance if exact => {
                    if d == 0.0 {
                        1.0
                    } else {
                        0.0
                    }
                }
                Weighting::InverseDistance => 1.0 / libm::sqrt(d),
            };
            if self.labels[i] {
                pos += w;
            } else {
                neg += w;
            }
        }
        pos > neg
    }
}
