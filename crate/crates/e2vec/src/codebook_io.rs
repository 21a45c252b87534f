//! CodeBook files.
//!
//! Binary layout (little-endian): `"E2CB"`, version u32, config hash (16
//! ASCII bytes), k u64, dim u64, seed u64, corpus hash u64, iterations u32,
//! then the `k × dim` centroid matrix as f64.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use e2vec_core::codebook::{CodeBook, Fingerprint};

use crate::binio;
use crate::error::{Error, Result};
use crate::model_io::hash_bytes;

pub const MAGIC: [u8; 4] = *b"E2CB";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct CodeBookFile {
    pub config_hash: String,
    pub codebook: CodeBook,
}

pub fn write_codebook<W: Write>(sink: W, cb: &CodeBook, config_hash: &str) -> Result<()> {
    let mut w = binio::Writer(sink);
    w.0.write_all(&MAGIC)?;
    w.u32(VERSION)?;
    w.0.write_all(&hash_bytes(config_hash))?;
    w.u64(cb.k() as u64)?;
    w.u64(cb.dim() as u64)?;
    w.u64(cb.fingerprint.seed)?;
    w.u64(cb.fingerprint.corpus_hash)?;
    w.u32(cb.fingerprint.iterations)?;
    w.f64s(cb.centroids())?;
    w.0.flush()?;
    Ok(())
}

pub fn read_codebook<R: Read>(source: R, origin: &Path) -> Result<CodeBookFile> {
    let bad = |m: String| Error::format(origin, m);
    let mut r = binio::Reader(source);
    let io = |e: std::io::Error| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => Error::format(origin, "truncated codebook file"),
        _ => Error::format(origin, e.to_string()),
    };
    if r.bytes::<4>().map_err(io)? != MAGIC {
        return Err(bad("not an e2vec codebook (bad magic)".into()));
    }
    let version = r.u32().map_err(io)?;
    if version != VERSION {
        return Err(bad(format!("unsupported codebook version {version}")));
    }
    let config_hash = String::from_utf8_lossy(&r.bytes::<16>().map_err(io)?).into_owned();
    let k = r.usize().map_err(io)?;
    let dim = r.usize().map_err(io)?;
    let fingerprint = Fingerprint {
        seed: r.u64().map_err(io)?,
        corpus_hash: r.u64().map_err(io)?,
        iterations: r.u32().map_err(io)?,
    };
    let centroids = r.f64s(k.saturating_mul(dim)).map_err(io)?;
    if !r.at_end().map_err(io)? {
        return Err(bad("trailing bytes after centroid matrix".into()));
    }
    let codebook = CodeBook::from_parts(dim, centroids, fingerprint).map_err(|e| bad(e.to_string()))?;
    Ok(CodeBookFile { config_hash, codebook })
}

pub fn save_codebook(path: &Path, cb: &CodeBook, config_hash: &str) -> Result<()> {
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    write_codebook(BufWriter::new(f), cb, config_hash)
}

pub fn load_codebook(path: &Path) -> Result<CodeBookFile> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    read_codebook(BufReader::new(f), path)
}

/// `k dim` line, then `cluster v1 .. vdim` per centroid.
pub fn write_text_codebook<W: Write>(mut w: W, cb: &CodeBook) -> Result<()> {
    writeln!(w, "{} {}", cb.k(), cb.dim())?;
    for i in 0..cb.k() {
        write!(w, "{i}")?;
        for v in cb.centroid(i) {
            write!(w, " {v}")?;
        }
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}
