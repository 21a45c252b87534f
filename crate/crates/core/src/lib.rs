//! Core algorithms for turning e-book event streams into per-student
//! feature vectors.
//!
//! The pipeline is: [`event`] partitions parsed events by student and
//! material, [`tokenizer`] turns each partition into actions made of units,
//! [`embedding`] trains a subword skip-gram model over units, [`vectorize`]
//! averages normalized unit vectors into action vectors, [`codebook`]
//! clusters action vectors, and [`aggregate`] folds a student's actions into
//! a bag-of-actions histogram. [`baseline`] and [`classify`] provide the
//! comparison feature and the at-risk prediction harness, and [`synth`]
//! generates labelled logs for end-to-end testing.
//!
//! The crate is `no_std` and only needs `alloc`. IO, file formats and
//! threading live in the companion `e2vec` crate.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod aggregate;
pub mod baseline;
pub mod classify;
pub mod codebook;
pub mod embedding;
mod error;
pub mod event;
pub mod math;
pub mod rng;
pub mod synth;
pub mod tokenizer;
pub mod vectorize;

pub use error::{Error, Result};
