//! Action vectors: the mean of the action's L2-normalized unit vectors.

use alloc::format;
use alloc::vec::Vec;

use crate::embedding::EmbeddingModel;
use crate::math::normalized;
use crate::tokenizer::Action;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ActionVector {
    pub values: Vec<f64>,
    /// Units that contributed to the mean.
    pub unit_count: usize,
    /// Units skipped because their vector was exactly zero.
    pub skipped: usize,
}

/// Averages already-computed unit vectors. Zero vectors are skipped.
pub fn mean_of_normalized<'a, I>(dim: usize, unit_vectors: I) -> Result<ActionVector>
where
    I: IntoIterator<Item = &'a [f64]>,
{
    let mut sum = alloc::vec![0.0f64; dim];
    let mut used = 0usize;
    let mut skipped = 0usize;
    for v in unit_vectors {
        if v.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: v.len() });
        }
        match normalized(v) {
            Some(n) => {
                sum.iter_mut().zip(&n).for_each(|(s, x)| *s += x);
                used += 1;
            }
            None => skipped += 1,
        }
    }
    if used == 0 {
        return Err(Error::Degenerate(format!(
            "every unit of the action has a zero vector ({skipped} units)"
        )));
    }
    let m = used as f64;
    sum.iter_mut().for_each(|s| *s /= m);
    Ok(ActionVector {
        values: sum,
        unit_count: used,
        skipped,
    })
}

/// Embeds one action through `model`.
pub fn action_vector(model: &EmbeddingModel, action: &Action) -> Result<ActionVector> {
    if action.units.is_empty() {
        return Err(Error::Degenerate("action has no units".into()));
    }
    let vectors: Vec<Vec<f64>> = action
        .units
        .iter()
        .map(|u| model.unit_vector(u.as_str()).values)
        .collect();
    mean_of_normalized(model.dim(), vectors.iter().map(Vec::as_slice))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn two_orthogonal_units() {
        let a = [1.0, 0.0];
        let b = [0.0, 1.0];
        let v = mean_of_normalized(2, [&a[..], &b[..]]).unwrap();
        assert_eq!(v.values, vec![0.5, 0.5]);
        assert_eq!(v.unit_count, 2);
    }

    #[test]
    fn single_unit_is_normalized() {
        let a = [3.0, 4.0];
        let v = mean_of_normalized(2, [&a[..]]).unwrap();
        assert_eq!(v.values, vec![0.6, 0.8]);
    }

    #[test]
    fn zero_units_are_skipped() {
        let a = [0.0, 0.0];
        let b = [0.0, 2.0];
        let v = mean_of_normalized(2, [&a[..], &b[..]]).unwrap();
        assert_eq!(v.values, vec![0.0, 1.0]);
        assert_eq!((v.unit_count, v.skipped), (1, 1));
        assert!(mean_of_normalized(2, [&a[..]]).is_err());
    }

    #[test]
    fn dimension_is_checked() {
        let a = [1.0, 0.0, 0.0];
        assert!(matches!(
            mean_of_normalized(2, [&a[..]]),
            Err(Error::DimensionMismatch { expected: 2, found: 3 })
        ));
    }
}
