//! Subword-aware skip-gram embeddings with negative sampling.
//!
//! Units are treated as words and actions as sentences. Each unit is
//! represented by its own input row plus the rows of its hashed character
//! n-grams, so units never seen in training still get a vector.

mod hyper;
mod model;
mod query;
pub mod sgns;
pub mod subword;
mod train;
mod vocab;

pub use hyper::Hyperparams;
pub use model::{EmbeddingModel, Subwords, UnitVector};
pub use query::{nearest_units, similarity_histogram, Histogram};
pub use train::{train, Trainer};
pub use vocab::{Vocab, VocabEntry};
