//! Feature matrix CSV shared by the E2Vec and Operation Count methods.
//!
//! ```text
//! # e2vec features method=e2vec config=<hash>
//! user_id,f0,..,f{k-1},action_count
//! ```
//!
//! The count column is `action_count` for E2Vec and `operation_count` for
//! the baseline. Values use shortest round-trip formatting.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::config::Method;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRow {
    pub user_id: String,
    pub values: Vec<f64>,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub method: Method,
    pub config_hash: String,
    pub rows: Vec<FeatureRow>,
}

impl FeatureMatrix {
    pub fn dim(&self) -> usize {
        self.rows.first().map_or(0, |r| r.values.len())
    }

    fn count_column(&self) -> &'static str {
        match self.method {
            Method::E2vec => "action_count",
            Method::Oc => "operation_count",
        }
    }
}

pub fn write_features<W: Write>(mut w: W, m: &FeatureMatrix) -> Result<()> {
    writeln!(w, "# e2vec features method={} config={}", m.method, m.config_hash)?;
    let dim = m.dim();
    let mut header = vec!["user_id".to_string()];
    header.extend((0..dim).map(|i| format!("f{i}")));
    header.push(m.count_column().into());
    let mut out = csv::Writer::from_writer(&mut w);
    let err = |e: csv::Error| Error::Stream(e.into());
    out.write_record(&header).map_err(err)?;
    for r in &m.rows {
        if r.values.len() != dim {
            return Err(Error::Dimension(format!("feature row for {} has {} values, expected {dim}", r.user_id, r.values.len())));
        }
        let mut rec = vec![r.user_id.clone()];
        rec.extend(r.values.iter().map(f64::to_string));
        rec.push(r.count.to_string());
        out.write_record(&rec).map_err(err)?;
    }
    out.flush()?;
    Ok(())
}

pub fn save_features(path: &Path, m: &FeatureMatrix) -> Result<()> {
    let mut buf = Vec::new();
    write_features(&mut buf, m)?;
    fs::write(path, buf).map_err(|e| Error::io(path, e))
}

fn header_value<'a>(line: &'a str, key: &str) -> Option<&'a str> {
    line.split_whitespace().find_map(|t| t.strip_prefix(key)?.strip_prefix('='))
}

/// Parses a feature CSV; `origin` only labels errors.
pub fn parse_features(text: &str, origin: &Path) -> Result<FeatureMatrix> {
    let bad = |m: String| Error::format(origin, m);
    let (first, body) = text.split_once('\n').unwrap_or((text, ""));
    if !first.starts_with("# e2vec features") {
        return Err(bad("missing feature header line".into()));
    }
    let method: Method = header_value(first, "method")
        .ok_or_else(|| bad("header lacks method".into()))?
        .parse()
        .map_err(bad)?;
    let config_hash = header_value(first, "config").unwrap_or_default().to_string();

    let mut rdr = csv::Reader::from_reader(body.as_bytes());
    let header = rdr.headers().map_err(|e| bad(e.to_string()))?.clone();
    let n = header.len();
    if n < 3 || &header[0] != "user_id" || !header[n - 1].ends_with("_count") {
        return Err(Error::Schema(format!("{}: expected user_id, f0.., *_count columns", origin.display())));
    }
    for (i, h) in header.iter().skip(1).take(n - 2).enumerate() {
        if h != format!("f{i}") {
            return Err(Error::Schema(format!("{}: column {h:?} should be f{i}", origin.display())));
        }
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let values = (1..n - 1)
            .map(|i| rec[i].parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| bad(format!("user {}: {e}", &rec[0])))?;
        let count = rec[n - 1].parse().map_err(|e| bad(format!("user {}: {e}", &rec[0])))?;
        rows.push(FeatureRow {
            user_id: rec[0].to_string(),
            values,
            count,
        });
    }
    Ok(FeatureMatrix {
        method,
        config_hash,
        rows,
    })
}

pub fn load_features(path: &Path) -> Result<FeatureMatrix> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_features(&text, path)
}
