//! Skip-gram training with negative sampling.
//!
//! [`Trainer`] owns the shared parameter tables. Workers update them without
//! locks through relaxed atomics, so several threads may call
//! [`Trainer::run_worker`] concurrently; with one worker the run is fully
//! deterministic for a given seed.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::sync::atomic::{AtomicU32, AtomicU64, Ordering};

use rand::Rng as _;

use super::model::{global_ids, init_row};
use super::sgns::pair_gradient;
use super::subword::ngram_buckets;
use super::{EmbeddingModel, Hyperparams, Subwords, Vocab};
use crate::rng;
use crate::tokenizer::Action;
use crate::{Error, Result};

/// Row-major `f32` matrix shared between workers.
struct SharedMatrix {
    dim: usize,
    data: Vec<AtomicU32>,
}

impl SharedMatrix {
    fn from_vec(dim: usize, values: Vec<f32>) -> Self {
        SharedMatrix {
            dim,
            data: values.into_iter().map(|x| AtomicU32::new(x.to_bits())).collect(),
        }
    }

    fn read_row(&self, row: usize, out: &mut [f32]) {
        let cells = &self.data[row * self.dim..(row + 1) * self.dim];
        for (o, c) in out.iter_mut().zip(cells) {
            *o = f32::from_bits(c.load(Ordering::Relaxed));
        }
    }

    fn add_row(&self, row: usize, scale: f32, delta: &[f32]) {
        let cells = &self.data[row * self.dim..(row + 1) * self.dim];
        for (c, &d) in cells.iter().zip(delta) {
            let v = f32::from_bits(c.load(Ordering::Relaxed)) + scale * d;
            c.store(v.to_bits(), Ordering::Relaxed);
        }
    }

    fn into_vec(self) -> Vec<f32> {
        self.data.into_iter().map(|c| f32::from_bits(c.into_inner())).collect()
    }
}

/// Prepared training state.
pub struct Trainer {
    hyper: Hyperparams,
    vocab: Vocab,
    sentences: Vec<Vec<u32>>,
    /// Compact input-row indices of each vocabulary word.
    word_rows: Vec<Vec<u32>>,
    input_ids: Vec<u64>,
    input: SharedMatrix,
    output: SharedMatrix,
    /// Cumulative unigram^0.75 weights for negative draws.
    neg_cdf: Vec<f64>,
    keep_prob: Vec<f64>,
    total_tokens: u64,
    processed: AtomicU64,
}

impl Trainer {
    pub fn new(corpus: &[Action], hyper: Hyperparams) -> Result<Self> {
        hyper.validate()?;
        let vocab = Vocab::build(
            corpus.iter().flat_map(|a| a.units.iter().map(|u| u.as_str())),
            hyper.min_count,
        );
        if vocab.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let sentences: Vec<Vec<u32>> = corpus
            .iter()
            .map(|a| a.units.iter().filter_map(|u| vocab.id(u.as_str())).collect::<Vec<_>>())
            .filter(|s| !s.is_empty())
            .collect();

        let nwords = vocab.len() as u64;
        let word_globals: Vec<Vec<u64>> = vocab
            .entries()
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let sw = Subwords {
                    buckets: ngram_buckets(&e.text, hyper.ngram_min, hyper.ngram_max, hyper.bucket_count),
                    word: Some(i as u32),
                };
                global_ids(&sw, nwords)
            })
            .collect();
        let mut compact: BTreeMap<u64, u32> = word_globals.iter().flatten().map(|&g| (g, 0)).collect();
        for (i, slot) in compact.values_mut().enumerate() {
            *slot = i as u32;
        }
        let word_rows = word_globals
            .iter()
            .map(|ids| ids.iter().map(|g| compact[g]).collect())
            .collect();
        let input_ids: Vec<u64> = compact.keys().copied().collect();

        let dim = hyper.dim;
        let mut init = Vec::with_capacity(input_ids.len() * dim);
        for &id in &input_ids {
            init.extend(init_row(hyper.seed, id, dim));
        }
        let input = SharedMatrix::from_vec(dim, init);
        let output = SharedMatrix::from_vec(dim, vec![0.0; vocab.len() * dim]);

        let mut acc = 0.0;
        let neg_cdf = vocab
            .entries()
            .iter()
            .map(|e| {
                acc += libm::pow(e.count as f64, 0.75);
                acc
            })
            .collect();
        let total = vocab.total_count() as f64;
        let keep_prob = vocab
            .entries()
            .iter()
            .map(|e| {
                let f = e.count as f64 / total;
                libm::sqrt(hyper.subsample_t / f) + hyper.subsample_t / f
            })
            .collect();
        let total_tokens = sentences.iter().map(|s| s.len() as u64).sum();

        Ok(Trainer {
            hyper,
            vocab,
            sentences,
            word_rows,
            input_ids,
            input,
            output,
            neg_cdf,
            keep_prob,
            total_tokens,
            processed: AtomicU64::new(0),
        })
    }

    pub fn vocab(&self) -> &Vocab {
        &self.vocab
    }

    fn sample_negative(&self, r: &mut rng::Rng) -> u32 {
        let total = *self.neg_cdf.last().expect("vocab is non-empty");
        let x = r.random::<f64>() * total;
        self.neg_cdf.partition_point(|&c| c <= x).min(self.neg_cdf.len() - 1) as u32
    }

    /// Runs all epochs over this worker's contiguous share of the sentences
    /// and returns the mean pair loss it observed.
    pub fn run_worker(&self, worker: usize, workers: usize) -> f64 {
        let h = &self.hyper;
        let dim = h.dim;
        let workers = workers.max(1);
        let n = self.sentences.len();
        let lo = n * worker / workers;
        let hi = n * (worker + 1) / workers;
        let mut r = rng::stream(h.seed, worker as u64);

        let budget = (h.epochs as u64 * self.total_tokens).max(1) as f64;
        let can_negate = self.vocab.len() > 1;
        let mut hidden = vec![0.0f32; dim];
        let mut row = vec![0.0f32; dim];
        let mut targets: Vec<u32> = Vec::with_capacity(h.negatives + 1);
        let mut labels: Vec<bool> = Vec::with_capacity(h.negatives + 1);
        let mut outputs = vec![0.0f32; (h.negatives + 1) * dim];
        let mut grad_out = vec![0.0f32; (h.negatives + 1) * dim];
        let mut grad_hidden = vec![0.0f32; dim];
        let mut line: Vec<u32> = Vec::new();
        let mut loss_sum = 0.0f64;
        let mut pairs = 0u64;

        for _ in 0..h.epochs {
            for sentence in &self.sentences[lo..hi] {
                let progress = self.processed.load(Ordering::Relaxed) as f64 / budget;
                let lr = (h.initial_lr * (1.0 - progress)).max(0.0) as f32;

                line.clear();
                line.extend(
                    sentence
                        .iter()
                        .copied()
                        .filter(|&w| r.random::<f64>() <= self.keep_prob[w as usize]),
                );

                for (pos, &center) in line.iter().enumerate() {
                    let rows = &self.word_rows[center as usize];
                    let inv = 1.0 / rows.len() as f32;
                    let span = r.random_range(1..=h.window);
                    let from = pos.saturating_sub(span);
                    let to = (pos + span).min(line.len() - 1);
                    for ctx in from..=to {
                        if ctx == pos {
                            continue;
                        }
                        let target = line[ctx];
                        hidden.iter_mut().for_each(|x| *x = 0.0);
                        for &ri in rows {
                            self.input.read_row(ri as usize, &mut row);
                            hidden.iter_mut().zip(&row).for_each(|(h, x)| *h += x);
                        }
                        hidden.iter_mut().for_each(|x| *x *= inv);
                        targets.clear();
                        labels.clear();
                        targets.push(target);
                        labels.push(true);
                        if can_negate {
                            for _ in 0..h.negatives {
                                let neg = loop {
                                    let c = self.sample_negative(&mut r);
                                    if c != target {
                                        break c;
                                    }
                                };
                                targets.push(neg);
                                labels.push(false);
                            }
                        }
                        let m = targets.len();
                        for (i, &t) in targets.iter().enumerate() {
                            self.output.read_row(t as usize, &mut outputs[i * dim..(i + 1) * dim]);
                        }
                        let loss = pair_gradient(
                            &hidden,
                            &outputs[..m * dim],
                            &labels,
                            &mut grad_hidden,
                            &mut grad_out[..m * dim],
                        );
                        loss_sum += f64::from(loss);
                        pairs += 1;
                        for (i, &t) in targets.iter().enumerate() {
                            self.output.add_row(t as usize, -lr, &grad_out[i * dim..(i + 1) * dim]);
                        }
                        // Every contributing row receives the full hidden
                        // gradient, as in the reference implementation.
                        for &ri in rows {
                            self.input.add_row(ri as usize, -lr, &grad_hidden);
                        }
                    }
                }
                self.processed.fetch_add(sentence.len() as u64, Ordering::Relaxed);
            }
        }
        if pairs == 0 {
            0.0
        } else {
            loss_sum / pairs as f64
        }
    }

    pub fn finish(self) -> EmbeddingModel {
        EmbeddingModel::from_parts(
            self.hyper,
            self.vocab,
            self.input_ids,
            self.input.into_vec(),
            self.output.into_vec(),
        )
        .expect("trainer builds consistent shapes")
    }
}

/// Single-threaded training; bit-identical for a fixed seed.
pub fn train(corpus: &[Action], hyper: Hyperparams) -> Result<EmbeddingModel> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let trainer = Trainer::new(corpus, hyper)?;
    trainer.run_worker(0, 1);
    Ok(trainer.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::sgns::sigmoid;
    use crate::math::dot;

    fn small(epochs: usize) -> Hyperparams {
        Hyperparams {
            dim: 8,
            epochs,
            bucket_count: 1000,
            ..Hyperparams::default()
        }
    }

    fn corpus(lines: &[&str]) -> Vec<Action> {
        lines.iter().map(|l| Action::parse(l).unwrap()).collect()
    }

    #[test]
    fn empty_corpus_is_rejected() {
        assert_eq!(train(&[], small(1)), Err(Error::EmptyCorpus));
    }

    #[test]
    fn vocab_holds_every_unit() {
        let c = corpus(&["OsNmNNm PsAl", "N", "Nm Ps Nm"]);
        let m = train(&c, small(2)).unwrap();
        assert_eq!(m.vocab().len(), 5);
        for u in ["OsNmNNm", "PsAl", "N", "Nm", "Ps"] {
            assert!(m.vocab().id(u).is_some());
        }
    }

    #[test]
    fn single_word_corpus_predicts_itself() {
        let c = corpus(&["Nm Nm Nm Nm"]);
        let h = Hyperparams {
            subsample_t: 1.0,
            ..small(200)
        };
        let m = train(&c, h).unwrap();
        let u = m.unit_vector("Nm").values;
        let out: Vec<f64> = m.output_row(0).iter().map(|&x| f64::from(x)).collect();
        assert!(sigmoid(dot(&u, &out)) > 0.5);
    }

    #[test]
    fn deterministic_single_thread() {
        let c = corpus(&["OsNmNNm PsAl", "N Nm", "Nm Ps Nm Nl", "NNs Ol"]);
        let a = train(&c, small(5)).unwrap();
        let b = train(&c, small(5)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn trained_vectors_are_finite() {
        let c = corpus(&["OsNmNNm PsAl", "N Nm", "Nm Ps Nm Nl"]);
        let m = train(&c, small(10)).unwrap();
        let (_, input) = m.stored_input();
        assert!(input.iter().chain(m.output_matrix()).all(|x| x.is_finite()));
    }
}
