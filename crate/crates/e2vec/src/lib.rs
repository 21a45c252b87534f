//! File formats, training driver and command line for the E2Vec pipeline.
//!
//! The algorithms live in `e2vec-core`; this crate reads and writes the
//! artifacts that connect the pipeline stages:
//!
//! | stage      | input                    | output                       |
//! |------------|--------------------------|------------------------------|
//! | `tokenize` | events CSV               | corpus text + index CSV      |
//! | `train`    | corpus                   | model (`E2VM`) + text export |
//! | `codebook` | model, corpus            | CodeBook (`E2CB`)            |
//! | `featurize`| events, model, CodeBook  | feature CSV                  |
//! | `predict`  | feature CSVs, grade CSVs | JSON report                  |

mod binio;
pub mod cli;
pub mod codebook_io;
pub mod config;
pub mod corpus;
pub mod error;
pub mod eventstream;
pub mod features;
pub mod grades;
pub mod model_io;
pub mod pipeline;
pub mod report;

pub use error::{Error, Result};
