//! Converts event partitions into actions (sentences) made of units (words)
//! made of primitive symbols (characters).
//!
//! Operations map to upper-case symbols and the time between two
//! consecutive operations maps to one of `s`, `m`, `l` (nothing below one
//! second). A unit spans at most one minute measured from its first
//! operation and at most 14 primitives; when a 15th primitive would be
//! appended the unit is closed with `_` and the primitive carries over to the
//! next unit (an interval symbol is dropped instead, so units always start
//! with an operation). An inter-operation gap longer than five minutes ends
//! the action.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::event::{EventPartition, PartitionKey, Timestamp};
use crate::{Error, Result};

/// Single-character symbol for an operation or an interval class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Primitive {
    Next,
    Prev,
    Open,
    AddMarker,
    Close,
    PageJump,
    GetIt,
    Other,
    Short,
    Medium,
    Long,
}

impl Primitive {
    pub const OPERATIONS: [Primitive; 8] = [
        Primitive::Next,
        Primitive::Prev,
        Primitive::Open,
        Primitive::AddMarker,
        Primitive::Close,
        Primitive::PageJump,
        Primitive::GetIt,
        Primitive::Other,
    ];

    pub fn symbol(self) -> char {
        match self {
            Primitive::Next => 'N',
            Primitive::Prev => 'P',
            Primitive::Open => 'O',
            Primitive::AddMarker => 'A',
            Primitive::Close => 'C',
            Primitive::PageJump => 'J',
            Primitive::GetIt => 'G',
            Primitive::Other => 'E',
            Primitive::Short => 's',
            Primitive::Medium => 'm',
            Primitive::Long => 'l',
        }
    }

    pub fn from_symbol(c: char) -> Option<Primitive> {
        Some(match c {
            'N' => Primitive::Next,
            'P' => Primitive::Prev,
            'O' => Primitive::Open,
            'A' => Primitive::AddMarker,
            'C' => Primitive::Close,
            'J' => Primitive::PageJump,
            'G' => Primitive::GetIt,
            'E' => Primitive::Other,
            's' => Primitive::Short,
            'm' => Primitive::Medium,
            'l' => Primitive::Long,
            _ => return None,
        })
    }

    pub fn is_interval(self) -> bool {
        matches!(self, Primitive::Short | Primitive::Medium | Primitive::Long)
    }

    /// The BookRoll operation name for a named operation symbol.
    pub fn operation_name(self) -> Option<&'static str> {
        Some(match self {
            Primitive::Next => "NEXT",
            Primitive::Prev => "PREV",
            Primitive::Open => "OPEN",
            Primitive::AddMarker => "ADD MARKER",
            Primitive::Close => "CLOSE",
            Primitive::PageJump => "PAGE JUMP",
            Primitive::GetIt => "GET IT",
            _ => return None,
        })
    }
}

/// Maps an operation name to its symbol; anything unlisted becomes `E`.
pub fn op_symbol(operation_name: &str) -> Primitive {
    match operation_name {
        "NEXT" => Primitive::Next,
        "PREV" => Primitive::Prev,
        "OPEN" => Primitive::Open,
        "ADD MARKER" => Primitive::AddMarker,
        "CLOSE" => Primitive::Close,
        "PAGE JUMP" => Primitive::PageJump,
        "GET IT" => Primitive::GetIt,
        _ => Primitive::Other,
    }
}

/// Interval class of the gap between two operations.
///
/// `[1, 10]` is short, `(10, 300]` medium, above 300 long; sub-second gaps
/// produce no symbol.
pub fn interval_symbol(delta_secs: i64) -> Option<Primitive> {
    match delta_secs {
        d if d < 1 => None,
        1..=10 => Some(Primitive::Short),
        11..=300 => Some(Primitive::Medium),
        _ => Some(Primitive::Long),
    }
}

/// Most primitives a unit holds before it is capped with `_`.
pub const UNIT_MAX_PRIMITIVES: usize = 14;
/// Longest legal unit text, terminator included.
pub const UNIT_MAX_LEN: usize = 15;
pub const UNIT_TERMINATOR: char = '_';

/// A validated unit string.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Unit(String);

impl Unit {
    /// Checks the structural rules: non-empty, at most 15 characters, only
    /// primitive symbols plus an optional trailing `_`, first symbol an
    /// operation.
    pub fn parse(text: &str) -> Result<Unit> {
        let bad = || Error::InvalidUnit(text.into());
        let body = text.strip_suffix(UNIT_TERMINATOR).unwrap_or(text);
        if body.is_empty() || text.chars().count() > UNIT_MAX_LEN {
            return Err(bad());
        }
        for (i, c) in body.chars().enumerate() {
            let p = Primitive::from_symbol(c).ok_or_else(bad)?;
            if i == 0 && p.is_interval() {
                return Err(bad());
            }
        }
        Ok(Unit(text.into()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_capped(&self) -> bool {
        self.0.ends_with(UNIT_TERMINATOR)
    }

    /// Primitive symbols of the unit, terminator excluded.
    pub fn primitives(&self) -> impl Iterator<Item = Primitive> + '_ {
        self.0.chars().filter_map(Primitive::from_symbol)
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A sequence of units between two long pauses.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Action {
    pub units: Vec<Unit>,
}

impl Action {
    /// Parses a space-separated line of units.
    pub fn parse(line: &str) -> Result<Action> {
        let units = line.split_whitespace().map(Unit::parse).collect::<Result<Vec<_>>>()?;
        if units.is_empty() {
            return Err(Error::InvalidUnit(line.into()));
        }
        Ok(Action { units })
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, u) in self.units.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(u.as_str())?;
        }
        Ok(())
    }
}

/// Segmentation thresholds, in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TokenizerConfig {
    /// A unit closes once the next operation is more than this many seconds
    /// after the unit's first operation.
    pub unit_window_secs: i64,
    /// A gap longer than this between consecutive operations ends the action.
    pub action_gap_secs: i64,
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        TokenizerConfig {
            unit_window_secs: 60,
            action_gap_secs: 300,
        }
    }
}

struct Segmenter {
    actions: Vec<Action>,
    units: Vec<Unit>,
    buf: String,
    prims: usize,
    unit_start: Timestamp,
}

impl Segmenter {
    fn new(first: Primitive, t: Timestamp) -> Self {
        let mut s = Segmenter {
            actions: Vec::new(),
            units: Vec::new(),
            buf: String::new(),
            prims: 0,
            unit_start: t,
        };
        s.push(first, t);
        s
    }

    fn push(&mut self, p: Primitive, t: Timestamp) {
        if self.prims == 0 {
            self.unit_start = t;
        }
        self.buf.push(p.symbol());
        self.prims += 1;
    }

    /// Appends under the length cap.
    fn push_capped(&mut self, p: Primitive, t: Timestamp) {
        if self.prims == UNIT_MAX_PRIMITIVES {
            self.buf.push(UNIT_TERMINATOR);
            self.close_unit();
            if p.is_interval() {
                return;
            }
        }
        self.push(p, t);
    }

    fn close_unit(&mut self) {
        if !self.buf.is_empty() {
            self.units.push(Unit(core::mem::take(&mut self.buf)));
        }
        self.prims = 0;
    }

    fn close_action(&mut self) {
        self.close_unit();
        if !self.units.is_empty() {
            self.actions.push(Action {
                units: core::mem::take(&mut self.units),
            });
        }
    }
}

/// Tokenizes a time-ordered stream of `(operation name, timestamp)` pairs.
pub fn tokenize_ops<'a, I>(ops: I, cfg: &TokenizerConfig) -> Vec<Action>
where
    I: IntoIterator<Item = (&'a str, Timestamp)>,
{
    let mut iter = ops.into_iter();
    let Some((first_op, first_t)) = iter.next() else {
        return Vec::new();
    };
    let mut seg = Segmenter::new(op_symbol(first_op), first_t);
    let mut prev_t = first_t;
    for (op, t) in iter {
        let sym = op_symbol(op);
        let gap = t.seconds_since(prev_t).max(0);
        let interval = interval_symbol(gap);
        if gap > cfg.action_gap_secs {
            // The pending interval terminates the closing unit even at the cap.
            if let Some(iv) = interval {
                seg.buf.push(iv.symbol());
            }
            seg.close_action();
            seg.push(sym, t);
        } else if t.seconds_since(seg.unit_start) > cfg.unit_window_secs {
            if let Some(iv) = interval {
                seg.buf.push(iv.symbol());
            }
            seg.close_unit();
            seg.push(sym, t);
        } else {
            if let Some(iv) = interval {
                seg.push_capped(iv, t);
            }
            seg.push_capped(sym, t);
        }
        prev_t = t;
    }
    seg.close_action();
    seg.actions
}

/// Tokenizes one (student, material) partition.
pub fn tokenize(partition: &EventPartition, cfg: &TokenizerConfig) -> Vec<Action> {
    tokenize_ops(
        partition.events.iter().map(|e| (e.operation_name.as_str(), e.event_time)),
        cfg,
    )
}

/// Actions of one partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusEntry {
    pub key: PartitionKey,
    pub actions: Vec<Action>,
}

/// Every action of a course, traceable to its partition.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ActionCorpus {
    pub entries: Vec<CorpusEntry>,
}

impl ActionCorpus {
    pub fn from_partitions(partitions: &[EventPartition], cfg: &TokenizerConfig) -> Self {
        ActionCorpus {
            entries: partitions
                .iter()
                .map(|p| CorpusEntry {
                    key: p.key.clone(),
                    actions: tokenize(p, cfg),
                })
                .collect(),
        }
    }

    pub fn actions(&self) -> impl Iterator<Item = &Action> {
        self.entries.iter().flat_map(|e| e.actions.iter())
    }

    pub fn action_count(&self) -> usize {
        self.entries.iter().map(|e| e.actions.len()).sum()
    }

    /// Flattened per-student view, materials in key order.
    pub fn per_student(&self) -> BTreeMap<&str, Vec<&Action>> {
        let mut out: BTreeMap<&str, Vec<&Action>> = BTreeMap::new();
        for e in &self.entries {
            out.entry(e.key.user_id.as_str()).or_default().extend(e.actions.iter());
        }
        out
    }
}
