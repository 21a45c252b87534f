use alloc::format;

use crate::{Error, Result};

/// Training hyperparameters.
///
/// Defaults follow the reference fastText skip-gram settings except
/// `min_count = 1` and `epochs = 30`, which suit the small unit vocabulary.
#[derive(Debug, Clone, PartialEq)]
pub struct Hyperparams {
    pub dim: usize,
    pub epochs: usize,
    pub min_count: u64,
    pub window: usize,
    pub negatives: usize,
    pub ngram_min: usize,
    pub ngram_max: usize,
    pub bucket_count: u64,
    pub initial_lr: f64,
    pub subsample_t: f64,
    pub seed: u64,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            dim: 100,
            epochs: 30,
            min_count: 1,
            window: 5,
            negatives: 5,
            ngram_min: 3,
            ngram_max: 6,
            bucket_count: 2_000_000,
            initial_lr: 0.05,
            subsample_t: 1e-4,
            seed: 42,
        }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(Error::Config(format!("embedding: {msg}")));
        if self.dim == 0 {
            return fail("dim must be at least 1");
        }
        if self.epochs == 0 {
            return fail("epochs must be at least 1");
        }
        if self.window == 0 {
            return fail("window must be at least 1");
        }
        if self.ngram_min == 0 || self.ngram_min > self.ngram_max {
            return fail("need 1 <= ngram_min <= ngram_max");
        }
        if self.bucket_count == 0 {
            return fail("bucket_count must be at least 1");
        }
        if !(self.initial_lr > 0.0 && self.initial_lr.is_finite()) {
            return fail("initial_lr must be positive");
        }
        if !(self.subsample_t > 0.0) {
            return fail("subsample_t must be positive");
        }
        Ok(())
    }
}
