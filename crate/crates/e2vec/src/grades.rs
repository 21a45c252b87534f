//! Two-column grade files: `user_id,grade`.

use std::io::{Read, Write};
use std::path::Path;

use e2vec_core::classify::Grade;

use crate::error::{Error, Result};

/// Reads `(user_id, grade letter)` pairs. Letters are validated later, when
/// they are turned into labels.
pub fn parse_grades<R: Read>(source: R, origin: &Path) -> Result<Vec<(String, String)>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(source);
    let header = rdr.headers().map_err(|e| Error::format(origin, e.to_string()))?;
    if header.len() != 2 {
        return Err(Error::Schema(format!(
            "{}: grade file needs exactly two columns (user_id, grade), found {}",
            origin.display(),
            header.len()
        )));
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::format(origin, e.to_string()))?;
        out.push((rec[0].to_string(), rec[1].to_string()));
    }
    Ok(out)
}

pub fn load_grades(path: &Path) -> Result<Vec<(String, String)>> {
    let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_grades(f, path)
}

pub fn write_grades<W: Write>(sink: W, grades: &[(String, Grade)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    let err = |e: csv::Error| Error::Stream(e.into());
    w.write_record(["user_id", "grade"]).map_err(err)?;
    for (u, g) in grades {
        w.write_record([u.as_str(), g.letter()]).map_err(err)?;
    }
    w.flush()?;
    Ok(())
}
