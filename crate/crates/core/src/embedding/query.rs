use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::EmbeddingModel;
use crate::math::{cosine, norm};
use crate::{Error, Result};

fn query_vector(model: &EmbeddingModel, query: &str) -> Result<Vec<f64>> {
    let v = model.unit_vector(query);
    if v.degenerate || norm(&v.values) == 0.0 {
        return Err(Error::Degenerate(format!("query unit {query:?} has a zero vector")));
    }
    Ok(v.values)
}

/// The `top_n` candidates most cosine-similar to `query`, best first.
///
/// The query string itself is skipped if it appears among the candidates;
/// ties keep candidate order.
pub fn nearest_units(
    model: &EmbeddingModel,
    query: &str,
    candidates: &[&str],
    top_n: usize,
) -> Result<Vec<(String, f64)>> {
    if candidates.is_empty() {
        return Err(Error::Config("no candidate units".into()));
    }
    let q = query_vector(model, query)?;
    let mut scored: Vec<(String, f64)> = candidates
        .iter()
        .filter(|&&c| c != query)
        .filter_map(|&c| cosine(&q, &model.unit_vector(c).values).map(|s| (c.into(), s)))
        .collect();
    scored.sort_by(|a, b| b.1.total_cmp(&a.1));
    scored.truncate(top_n);
    Ok(scored)
}

/// Counts over `bins` equal-width bins spanning `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    /// `bins + 1` edges.
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

impl Histogram {
    pub fn new(bins: usize) -> Self {
        Histogram {
            edges: (0..=bins).map(|i| (2.0 * i as f64 - bins as f64) / bins as f64).collect(),
            counts: vec![0; bins],
        }
    }

    /// Bins are left-closed; the top bin also holds `1.0`.
    pub fn add(&mut self, value: f64) {
        let bins = self.counts.len();
        let x = value.clamp(-1.0, 1.0);
        let idx = (((x + 1.0) / 2.0) * bins as f64) as usize;
        self.counts[idx.min(bins - 1)] += 1;
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }
}

/// Distribution of cosine similarities between `query` and every candidate.
pub fn similarity_histogram(
    model: &EmbeddingModel,
    query: &str,
    candidates: &[&str],
    bins: usize,
) -> Result<Histogram> {
    if bins == 0 {
        return Err(Error::Config("histogram needs at least one bin".into()));
    }
    if candidates.is_empty() {
        return Err(Error::Config("no candidate units".into()));
    }
    let q = query_vector(model, query)?;
    let mut hist = Histogram::new(bins);
    for &c in candidates {
        if let Some(s) = cosine(&q, &model.unit_vector(c).values) {
            hist.add(s);
        }
    }
    Ok(hist)
}
