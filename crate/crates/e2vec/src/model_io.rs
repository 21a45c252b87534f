//! Embedding model files.
//!
//! Binary layout (little-endian):
//!
//! ```text
//! "E2VM" | version u32 | config hash (16 ASCII bytes)
//! dim epochs min_count window negatives ngram_min ngram_max bucket_count : u64
//! initial_lr subsample_t : f64 | seed : u64
//! vocab: n u64, then n × (len u32, utf-8 text, count u64)
//! stored input rows: m u64, m × row id u64, m × dim f32
//! output matrix: n × dim f32
//! ```
//!
//! Input rows that were never stored are recomputed from the seed, so the
//! file stays small even with millions of hash buckets.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use e2vec_core::embedding::{EmbeddingModel, Hyperparams, Vocab, VocabEntry};

use crate::binio;
use crate::error::{Error, Result};

pub const MAGIC: [u8; 4] = *b"E2VM";
pub const VERSION: u32 = 1;

/// A model together with the config hash recorded in its file.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelFile {
    pub config_hash: String,
    pub model: EmbeddingModel,
}

pub(crate) fn hash_bytes(hash: &str) -> [u8; 16] {
    let mut out = [b'0'; 16];
    for (o, b) in out.iter_mut().zip(hash.bytes()) {
        *o = b;
    }
    out
}

pub fn write_model<W: Write>(sink: W, model: &EmbeddingModel, config_hash: &str) -> Result<()> {
    let mut w = binio::Writer(sink);
    w.0.write_all(&MAGIC)?;
    w.u32(VERSION)?;
    w.0.write_all(&hash_bytes(config_hash))?;
    let h = model.hyperparams();
    for v in [h.dim, h.epochs] {
        w.u64(v as u64)?;
    }
    w.u64(h.min_count)?;
    for v in [h.window, h.negatives, h.ngram_min, h.ngram_max] {
        w.u64(v as u64)?;
    }
    w.u64(h.bucket_count)?;
    w.f64(h.initial_lr)?;
    w.f64(h.subsample_t)?;
    w.u64(h.seed)?;

    let vocab = model.vocab();
    w.u64(vocab.len() as u64)?;
    for e in vocab.entries() {
        w.str(&e.text)?;
        w.u64(e.count)?;
    }
    let (ids, rows) = model.stored_input();
    w.u64(ids.len() as u64)?;
    for &id in ids {
        w.u64(id)?;
    }
    w.f32s(rows)?;
    w.f32s(model.output_matrix())?;
    w.0.flush()?;
    Ok(())
}

/// Reads a model; `expected_dim` rejects files of another dimension.
/// `origin` only labels errors.
pub fn read_model<R: Read>(source: R, expected_dim: Option<usize>, origin: &Path) -> Result<ModelFile> {
    let bad = |m: &str| Error::format(origin, m.to_string());
    let mut r = binio::Reader(source);
    let truncated = |_| bad("truncated model file");
    if r.bytes::<4>().map_err(truncated)? != MAGIC {
        return Err(bad("not an e2vec model (bad magic)"));
    }
    let version = r.u32().map_err(truncated)?;
    if version != VERSION {
        return Err(bad(&format!("unsupported model version {version}")));
    }
    let config_hash = String::from_utf8_lossy(&r.bytes::<16>().map_err(truncated)?).into_owned();

    let mut body = || -> std::io::Result<ModelFile> {
        let dim = r.usize()?;
        let epochs = r.usize()?;
        let min_count = r.u64()?;
        let window = r.usize()?;
        let negatives = r.usize()?;
        let ngram_min = r.usize()?;
        let ngram_max = r.usize()?;
        let bucket_count = r.u64()?;
        let initial_lr = r.f64()?;
        let subsample_t = r.f64()?;
        let seed = r.u64()?;
        let hyper = Hyperparams {
            dim,
            epochs,
            min_count,
            window,
            negatives,
            ngram_min,
            ngram_max,
            bucket_count,
            initial_lr,
            subsample_t,
            seed,
        };
        if let Some(want) = expected_dim {
            if want != dim {
                return Err(std::io::Error::other(DimError(want, dim)));
            }
        }
        let n = r.usize()?;
        let mut entries = Vec::with_capacity(n.min(1 << 20));
        for _ in 0..n {
            let text = r.str()?;
            let count = r.u64()?;
            entries.push(VocabEntry { text, count });
        }
        let m = r.usize()?;
        let mut ids = Vec::with_capacity(m.min(1 << 20));
        for _ in 0..m {
            ids.push(r.u64()?);
        }
        let input = r.f32s(m.saturating_mul(dim))?;
        let output = r.f32s(n.saturating_mul(dim))?;
        if !r.at_end()? {
            return Err(std::io::Error::new(std::io::ErrorKind::InvalidData, "trailing bytes"));
        }
        let model = EmbeddingModel::from_parts(hyper, Vocab::from_entries(entries), ids, input, output)
            .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e.to_string()))?;
        Ok(ModelFile {
            config_hash: config_hash.clone(),
            model,
        })
    };
    body().map_err(|e| {
        if let Some(DimError(want, got)) = e.get_ref().and_then(|i| i.downcast_ref::<DimError>()) {
            return Error::Dimension(format!("model {} has dimension {got}, expected {want}", origin.display()));
        }
        if e.kind() == std::io::ErrorKind::UnexpectedEof {
            bad("truncated model file")
        } else {
            bad(&e.to_string())
        }
    })
}

#[derive(Debug)]
struct DimError(usize, usize);

impl std::fmt::Display for DimError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "dimension {} != {}", self.1, self.0)
    }
}

impl std::error::Error for DimError {}

pub fn save_model(path: &Path, model: &EmbeddingModel, config_hash: &str) -> Result<()> {
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    write_model(BufWriter::new(f), model, config_hash)
}

pub fn load_model(path: &Path, expected_dim: Option<usize>) -> Result<ModelFile> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    read_model(BufReader::new(f), expected_dim, path)
}

/// Text export: a `count dim` line, then one `unit v1 .. vdim` line per
/// vocabulary entry. Values are the unit vectors in shortest round-trip
/// decimal form, so parsing them back gives the exact `f64`s.
pub fn write_text_vectors<W: Write>(mut w: W, model: &EmbeddingModel) -> Result<()> {
    let vocab = model.vocab();
    writeln!(w, "{} {}", vocab.len(), model.dim())?;
    for e in vocab.entries() {
        write!(w, "{}", e.text)?;
        for v in model.unit_vector(&e.text).values {
            write!(w, " {v}")?;
        }
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}
