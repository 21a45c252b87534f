use alloc::borrow::Cow;
use alloc::vec::Vec;

use rand::Rng as _;

use super::subword::ngram_buckets;
use super::{Hyperparams, Vocab};
use crate::rng;
use crate::{Error, Result};

/// Input-row ids of one unit string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subwords {
    /// N-gram buckets in `[0, bucket_count)`.
    pub buckets: Vec<u64>,
    /// Vocabulary id, when the unit was seen in training.
    pub word: Option<u32>,
}

/// A unit's embedding and whether it had no rows to average.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitVector {
    pub values: Vec<f64>,
    pub degenerate: bool,
}

/// A trained model.
///
/// Logically the input matrix has `|vocab| + bucket_count` rows. Only rows
/// reachable from the training vocabulary are stored; every other row still
/// holds its deterministic random initialization, which is regenerated on
/// demand from the seed and the row id.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingModel {
    hyper: Hyperparams,
    vocab: Vocab,
    input_ids: Vec<u64>,
    input: Vec<f32>,
    output: Vec<f32>,
}

/// Initial value of input row `id`: uniform in `[-1/dim, 1/dim]`.
pub(crate) fn init_row(seed: u64, id: u64, dim: usize) -> Vec<f32> {
    let mut r = rng::stream(seed ^ 0x6e67_7261_6d73, id);
    let bound = 1.0 / dim as f32;
    (0..dim).map(|_| r.random_range(-bound..=bound)).collect()
}

impl EmbeddingModel {
    /// Assembles a model from stored parts, checking shapes.
    ///
    /// `input_ids` must be strictly increasing global row ids.
    pub fn from_parts(
        hyper: Hyperparams,
        vocab: Vocab,
        input_ids: Vec<u64>,
        input: Vec<f32>,
        output: Vec<f32>,
    ) -> Result<Self> {
        hyper.validate()?;
        let dim = hyper.dim;
        if input.len() != input_ids.len() * dim {
            return Err(Error::DimensionMismatch {
                expected: input_ids.len() * dim,
                found: input.len(),
            });
        }
        if output.len() != vocab.len() * dim {
            return Err(Error::DimensionMismatch {
                expected: vocab.len() * dim,
                found: output.len(),
            });
        }
        let rows = vocab.len() as u64 + hyper.bucket_count;
        if input_ids.windows(2).any(|w| w[0] >= w[1]) || input_ids.last().is_some_and(|&id| id >= rows) {
            return Err(Error::Config("input row ids must be increasing and in range".into()));
        }
        Ok(EmbeddingModel {
            hyper,
            vocab,
            input_ids,
            input,
            output,
        })
    }

    pub fn hyperparams(&self) -> &Hyperparams {
        &self.hyper
    }

    pub fn vocab(&self) -> &Vocab {
        &self.vocab
    }

    pub fn dim(&self) -> usize {
        self.hyper.dim
    }

    /// Stored input rows: sorted global ids and the row-major matrix.
    pub fn stored_input(&self) -> (&[u64], &[f32]) {
        (&self.input_ids, &self.input)
    }

    /// Output matrix, one row per vocabulary entry.
    pub fn output_matrix(&self) -> &[f32] {
        &self.output
    }

    pub fn output_row(&self, word: u32) -> &[f32] {
        let d = self.dim();
        &self.output[word as usize * d..(word as usize + 1) * d]
    }

    /// Input row for a global id: words first, then `|vocab| + bucket`.
    pub fn input_row(&self, id: u64) -> Cow<'_, [f32]> {
        let d = self.dim();
        match self.input_ids.binary_search(&id) {
            Ok(i) => Cow::Borrowed(&self.input[i * d..(i + 1) * d]),
            Err(_) => Cow::Owned(init_row(self.hyper.seed, id, d)),
        }
    }

    pub fn extract_subwords(&self, text: &str) -> Subwords {
        let h = &self.hyper;
        Subwords {
            buckets: ngram_buckets(text, h.ngram_min, h.ngram_max, h.bucket_count),
            word: self.vocab.id(text),
        }
    }

    /// Global input-row ids of `text`: the word id (if known) then n-grams.
    pub fn subword_ids(&self, text: &str) -> Vec<u64> {
        global_ids(&self.extract_subwords(text), self.vocab.len() as u64)
    }

    /// Mean of the input rows of `text`. Defined for any string; a string
    /// with no rows at all yields the zero vector flagged as degenerate.
    pub fn unit_vector(&self, text: &str) -> UnitVector {
        let ids = self.subword_ids(text);
        let mut values = alloc::vec![0.0f64; self.dim()];
        if ids.is_empty() {
            return UnitVector { values, degenerate: true };
        }
        for &id in &ids {
            for (v, &x) in values.iter_mut().zip(self.input_row(id).iter()) {
                *v += f64::from(x);
            }
        }
        let n = ids.len() as f64;
        values.iter_mut().for_each(|v| *v /= n);
        let degenerate = values.iter().all(|&v| v == 0.0);
        UnitVector { values, degenerate }
    }
}

pub(crate) fn global_ids(sw: &Subwords, nwords: u64) -> Vec<u64> {
    sw.word
        .map(u64::from)
        .into_iter()
        .chain(sw.buckets.iter().map(|b| nwords + b))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::VocabEntry;
    use alloc::vec;

    fn tiny() -> EmbeddingModel {
        let hyper = Hyperparams {
            dim: 2,
            bucket_count: 16,
            ..Hyperparams::default()
        };
        let vocab = Vocab::from_entries(vec![VocabEntry { text: "Nm".into(), count: 3 }]);
        EmbeddingModel::from_parts(hyper, vocab, vec![0], vec![1.0, 0.0], vec![0.0, 0.0]).unwrap()
    }

    #[test]
    fn init_rows_are_reproducible_and_bounded() {
        let a = init_row(7, 123, 10);
        assert_eq!(a, init_row(7, 123, 10));
        assert_ne!(a, init_row(7, 124, 10));
        assert!(a.iter().all(|x| x.abs() <= 0.1));
    }

    #[test]
    fn unit_vector_uses_word_and_ngrams() {
        let m = tiny();
        let ids = m.subword_ids("Nm");
        assert_eq!(ids.len(), 4);
        assert_eq!(ids[0], 0);
        let v = m.unit_vector("Nm");
        assert!(!v.degenerate);
        assert_eq!(v.values, m.unit_vector("Nm").values);
        let oov = m.unit_vector("NNNNsNmNsNsPl");
        assert!(!oov.degenerate);
        assert!(oov.values.iter().any(|&x| x != 0.0));
    }

    #[test]
    fn degenerate_without_rows() {
        let mut m = tiny();
        m.hyper.ngram_min = 20;
        m.hyper.ngram_max = 20;
        let v = m.unit_vector("Ps");
        assert!(v.degenerate);
        assert_eq!(v.values, vec![0.0, 0.0]);
    }

    #[test]
    fn from_parts_checks_shapes() {
        let hyper = Hyperparams {
            dim: 2,
            bucket_count: 16,
            ..Hyperparams::default()
        };
        let vocab = Vocab::from_entries(vec![VocabEntry { text: "Nm".into(), count: 3 }]);
        assert!(EmbeddingModel::from_parts(hyper.clone(), vocab.clone(), vec![0], vec![1.0], vec![0.0, 0.0]).is_err());
        assert!(EmbeddingModel::from_parts(hyper, vocab, vec![3, 1], vec![0.0; 4], vec![0.0, 0.0]).is_err());
    }
}
