//! Action corpus files.
//!
//! The corpus is plain text: an optional `#` comment header, then one action
//! per line with units separated by single spaces. A sidecar CSV
//! (`<corpus>.index.csv`) maps consecutive line ranges to the
//! `(user_id, contents_id)` partition they came from.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use e2vec_core::event::PartitionKey;
use e2vec_core::tokenizer::{Action, ActionCorpus, CorpusEntry};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const HEADER_PREFIX: &str = "# e2vec corpus config=";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct IndexRow {
    user_id: String,
    contents_id: String,
    first_action: usize,
    action_count: usize,
}

pub fn index_path(corpus: &Path) -> PathBuf {
    let mut name = corpus.file_name().unwrap_or_default().to_os_string();
    name.push(".index.csv");
    corpus.with_file_name(name)
}

pub fn write_actions<'a, W, I>(mut w: W, actions: I, config_hash: &str) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a Action>,
{
    writeln!(w, "{HEADER_PREFIX}{config_hash}")?;
    for a in actions {
        writeln!(w, "{a}")?;
    }
    w.flush()?;
    Ok(())
}

/// Reads actions, returning the config hash from the header when present.
/// `origin` only labels errors.
pub fn parse_actions<R: BufRead>(r: R, origin: &Path) -> Result<(Option<String>, Vec<Action>)> {
    let mut hash = None;
    let mut actions = Vec::new();
    for (n, line) in r.lines().enumerate() {
        let line = line?;
        if let Some(rest) = line.strip_prefix('#') {
            if let Some(h) = line.strip_prefix(HEADER_PREFIX) {
                hash = Some(h.trim().to_string());
            } else if n == 0 && rest.contains("config=") {
                return Err(Error::format(origin, "unrecognized corpus header"));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let action = Action::parse(&line).map_err(|e| Error::format(origin, format!("line {}: {e}", n + 1)))?;
        actions.push(action);
    }
    Ok((hash, actions))
}

/// A corpus read back from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusFile {
    pub config_hash: Option<String>,
    pub corpus: ActionCorpus,
}

pub fn write_corpus(path: &Path, corpus: &ActionCorpus, config_hash: &str) -> Result<()> {
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    write_actions(BufWriter::new(f), corpus.actions(), config_hash)?;

    let ipath = index_path(path);
    let f = File::create(&ipath).map_err(|e| Error::io(&ipath, e))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(f));
    let mut first = 0;
    for e in &corpus.entries {
        w.serialize(IndexRow {
            user_id: e.key.user_id.clone(),
            contents_id: e.key.contents_id.clone(),
            first_action: first,
            action_count: e.actions.len(),
        })
        .map_err(|e| Error::format(&ipath, e.to_string()))?;
        first += e.actions.len();
    }
    w.flush().map_err(|e| Error::io(&ipath, e))?;
    Ok(())
}

/// Reads a corpus and its index. Without an index every action is filed
/// under one anonymous partition.
pub fn read_corpus(path: &Path) -> Result<CorpusFile> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    let (config_hash, actions) = parse_actions(BufReader::new(f), path)?;

    let ipath = index_path(path);
    if !ipath.exists() {
        let entries = vec![CorpusEntry {
            key: PartitionKey {
                user_id: String::new(),
                contents_id: String::new(),
            },
            actions,
        }];
        return Ok(CorpusFile {
            config_hash,
            corpus: ActionCorpus { entries },
        });
    }

    let mut rdr = csv::Reader::from_path(&ipath).map_err(|e| Error::format(&ipath, e.to_string()))?;
    let mut entries = Vec::new();
    let mut next = 0;
    for row in rdr.deserialize::<IndexRow>() {
        let row = row.map_err(|e| Error::format(&ipath, e.to_string()))?;
        if row.first_action != next || row.first_action + row.action_count > actions.len() {
            return Err(Error::format(&ipath, format!("line range of {} does not match the corpus", row.user_id)));
        }
        next += row.action_count;
        entries.push(CorpusEntry {
            key: PartitionKey {
                user_id: row.user_id,
                contents_id: row.contents_id,
            },
            actions: actions[row.first_action..next].to_vec(),
        });
    }
    if next != actions.len() {
        return Err(Error::format(&ipath, "index does not cover every action"));
    }
    Ok(CorpusFile {
        config_hash,
        corpus: ActionCorpus { entries },
    })
}
