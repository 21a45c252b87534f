//! Bag-of-actions student vectors.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::codebook::CodeBook;
use crate::vectorize::ActionVector;
use crate::{Error, Result};

/// How the action histogram is scaled.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum HistogramMode {
    /// Relative frequencies summing to one.
    #[default]
    Normalized,
    /// Raw assignment counts.
    Counts,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudentVector {
    pub user_id: String,
    pub values: Vec<f64>,
    pub action_count: usize,
}

impl StudentVector {
    /// True for a student without any action; the vector is then all zeros.
    pub fn is_empty(&self) -> bool {
        self.action_count == 0
    }
}

/// Histogram of CodeWord assignments over a student's actions.
pub fn student_vector(
    codebook: &CodeBook,
    actions: &[ActionVector],
    user_id: &str,
    mode: HistogramMode,
) -> Result<StudentVector> {
    let mut values = vec![0.0f64; codebook.k()];
    for a in actions {
        if a.values.len() != codebook.dim() {
            return Err(Error::DimensionMismatch {
                expected: codebook.dim(),
                found: a.values.len(),
            });
        }
        values[codebook.assign(&a.values)?] += 1.0;
    }
    if mode == HistogramMode::Normalized && !actions.is_empty() {
        let n = actions.len() as f64;
        values.iter_mut().for_each(|v| *v /= n);
    }
    Ok(StudentVector {
        user_id: user_id.into(),
        values,
        action_count: actions.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codebook::Fingerprint;

    fn cb() -> CodeBook {
        let fp = Fingerprint { corpus_hash: 0, seed: 0, iterations: 0 };
        CodeBook::from_parts(2, vec![1.0, 0.0, 0.0, 1.0], fp).unwrap()
    }

    fn av(x: f64, y: f64) -> ActionVector {
        ActionVector { values: vec![x, y], unit_count: 1, skipped: 0 }
    }

    #[test]
    fn even_split() {
        let acts = [av(1.0, 0.1), av(0.9, 0.0), av(0.0, 1.0), av(0.2, 0.7)];
        let s = student_vector(&cb(), &acts, "u1", HistogramMode::Normalized).unwrap();
        assert_eq!(s.values, vec![0.5, 0.5]);
        assert_eq!(s.action_count, 4);
        let raw = student_vector(&cb(), &acts, "u1", HistogramMode::Counts).unwrap();
        assert_eq!(raw.values, vec![2.0, 2.0]);
    }

    #[test]
    fn no_actions_is_zero_vector() {
        let s = student_vector(&cb(), &[], "u1", HistogramMode::Normalized).unwrap();
        assert!(s.is_empty());
        assert_eq!(s.values, vec![0.0, 0.0]);
    }

    #[test]
    fn dimension_mismatch() {
        let bad = ActionVector { values: vec![1.0, 0.0, 0.0], unit_count: 1, skipped: 0 };
        assert!(matches!(
            student_vector(&cb(), &[bad], "u1", HistogramMode::Normalized),
            Err(Error::DimensionMismatch { expected: 2, found: 3 })
        ));
    }
}
