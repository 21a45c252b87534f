//! Operation Count baseline: counts of the seven named operations, scaled
//! to unit norm.

use alloc::string::String;
use alloc::vec::Vec;

use crate::event::Event;
use crate::tokenizer::{op_symbol, Primitive};

/// Operations counted by the baseline, in column order. The catch-all
/// symbol is not counted.
pub const OC_OPERATIONS: [Primitive; 7] = [
    Primitive::Next,
    Primitive::Prev,
    Primitive::Open,
    Primitive::AddMarker,
    Primitive::Close,
    Primitive::PageJump,
    Primitive::GetIt,
];

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum OcNorm {
    #[default]
    L2,
    L1,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OcVector {
    pub user_id: String,
    pub values: [f64; 7],
    /// Number of counted operations before normalization.
    pub operation_count: u64,
}

pub fn oc_counts<'a, I: IntoIterator<Item = &'a Event>>(events: I) -> [u64; 7] {
    let mut counts = [0u64; 7];
    for e in events {
        let sym = op_symbol(&e.operation_name);
        if let Some(i) = OC_OPERATIONS.iter().position(|&p| p == sym) {
            counts[i] += 1;
        }
    }
    counts
}

/// Normalized operation counts of one student's events.
pub fn oc_vector<'a, I: IntoIterator<Item = &'a Event>>(user_id: &str, events: I, norm: OcNorm) -> OcVector {
    let counts = oc_counts(events);
    let total: u64 = counts.iter().sum();
    let scale = match norm {
        OcNorm::L2 => libm::sqrt(counts.iter().map(|&c| (c * c) as f64).sum()),
        OcNorm::L1 => total as f64,
    };
    let mut values = [0.0f64; 7];
    if scale > 0.0 {
        for (v, &c) in values.iter_mut().zip(&counts) {
            *v = c as f64 / scale;
        }
    }
    OcVector {
        user_id: user_id.into(),
        values,
        operation_count: total,
    }
}

impl OcVector {
    pub fn to_vec(&self) -> Vec<f64> {
        self.values.to_vec()
    }
}
