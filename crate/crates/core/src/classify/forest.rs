use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng as _;

use super::ForestParams;
use crate::rng;

#[derive(Debug, Clone)]
enum Node {
    Leaf {
        /// Fraction of positive training samples that reached the leaf.
        positive: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

/// CART tree on Gini impurity; `x[feature] <= threshold` goes left.
#[derive(Debug, Clone)]
pub struct DecisionTree {
    nodes: Vec<Node>,
}

struct Builder<'a> {
    x: &'a [Vec<f64>],
    y: &'a [bool],
    params: &'a ForestParams,
    max_features: usize,
    rng: rng::Rng,
    nodes: Vec<Node>,
}

fn gini(pos: usize, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let p = pos as f64 / n as f64;
    2.0 * p * (1.0 - p)
}

impl Builder<'_> {
    fn leaf(&mut self, idx: &[usize]) -> usize {
        let pos = idx.iter().filter(|&&i| self.y[i]).count();
        self.nodes.push(Node::Leaf {
            positive: pos as f64 / idx.len().max(1) as f64,
        });
        self.nodes.len() - 1
    }

    /// Best split of `idx` on `feature`: (weighted child impurity, threshold).
    fn best_on(&self, idx: &mut [usize], feature: usize) -> Option<(f64, f64)> {
        idx.sort_by(|&a, &b| self.x[a][feature].total_cmp(&self.x[b][feature]).then(a.cmp(&b)));
        let n = idx.len();
        let total_pos = idx.iter().filter(|&&i| self.y[i]).count();
        let mut left_pos = 0usize;
        let mut best: Option<(f64, f64)> = None;
        for s in 1..n {
            if self.y[idx[s - 1]] {
                left_pos += 1;
            }
            let lo = self.x[idx[s - 1]][feature];
            let hi = self.x[idx[s]][feature];
            if lo == hi {
                continue;
            }
            let score = s as f64 * gini(left_pos, s) + (n - s) as f64 * gini(total_pos - left_pos, n - s);
            if best.is_none_or(|(b, _)| score < b) {
                let mut threshold = lo / 2.0 + hi / 2.0;
                if threshold >= hi {
                    threshold = lo;
                }
                best = Some((score, threshold));
            }
        }
        best
    }

    fn grow(&mut self, idx: &mut [usize], depth: usize) -> usize {
        let n = idx.len();
        let pos = idx.iter().filter(|&&i| self.y[i]).count();
        let at_depth = self.params.max_depth.is_some_and(|d| depth >= d);
        if at_depth || n < self.params.min_split || pos == 0 || pos == n {
            return self.leaf(idx);
        }

        let dim = self.x[0].len();
        let mut features: Vec<usize> = (0..dim).collect();
        features.shuffle(&mut self.rng);
        let mut best: Option<(f64, usize, f64)> = None;
        // Like the usual implementation, keep drawing features past
        // `max_features` until at least one admits a split.
        for (tried, &f) in features.iter().enumerate() {
            if tried >= self.max_features && best.is_some() {
                break;
            }
            if let Some((score, t)) = self.best_on(idx, f) {
                if best.is_none_or(|(b, _, _)| score < b) {
                    best = Some((score, f, t));
                }
            }
        }
        let Some((_, feature, threshold)) = best else {
            return self.leaf(idx);
        };

        let (mut left, mut right): (Vec<usize>, Vec<usize>) =
            idx.iter().partition(|&&i| self.x[i][feature] <= threshold);
        let slot = self.nodes.len();
        self.nodes.push(Node::Leaf { positive: 0.0 });
        let l = self.grow(&mut left, depth + 1);
        let r = self.grow(&mut right, depth + 1);
        self.nodes[slot] = Node::Split {
            feature,
            threshold,
            left: l,
            right: r,
        };
        slot
    }
}

impl DecisionTree {
    /// Fits on the rows listed in `sample` (duplicates allowed).
    pub fn fit(
        x: &[Vec<f64>],
        y: &[bool],
        sample: Vec<usize>,
        params: &ForestParams,
        max_features: usize,
        rng: rng::Rng,
    ) -> Self {
        let mut b = Builder {
            x,
            y,
            params,
            max_features: max_features.max(1),
            rng,
            nodes: Vec::new(),
        };
        let mut idx = sample;
        b.grow(&mut idx, 0);
        DecisionTree { nodes: b.nodes }
    }

    pub fn predict_proba(&self, x: &[f64]) -> f64 {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                Node::Leaf { positive } => return positive,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => at = if x[feature] <= threshold { left } else { right },
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], at: usize) -> usize {
            match nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
            }
        }
        walk(&self.nodes, 0)
    }
}

/// Bagged trees with `sqrt(d)` candidate features per split.
#[derive(Debug, Clone)]
pub struct RandomForest {
    trees: Vec<DecisionTree>,
    dim: usize,
}

impl RandomForest {
    /// Tree `i` draws its bootstrap sample and feature order from a stream
    /// derived from `(seed, i)`.
    pub fn fit(params: &ForestParams, x: &[Vec<f64>], y: &[bool], seed: u64) -> Self {
        let n = x.len();
        let dim = x.first().map_or(0, Vec::len);
        let max_features = (libm::sqrt(dim as f64) as usize).max(1);
        let trees = (0..params.trees)
            .map(|t| {
                let mut r = rng::stream(seed, t as u64);
                let sample: Vec<usize> = (0..n).map(|_| r.random_range(0..n)).collect();
                DecisionTree::fit(x, y, sample, params, max_features, r)
            })
            .collect();
        RandomForest { trees, dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn trees(&self) -> &[DecisionTree] {
        &self.trees
    }

    /// Mean leaf probability over trees.
    pub fn predict_proba(&self, x: &[f64]) -> f64 {
        if self.trees.is_empty() {
            return 0.0;
        }
        self.trees.iter().map(|t| t.predict_proba(x)).sum::<f64>() / self.trees.len() as f64
    }
}
