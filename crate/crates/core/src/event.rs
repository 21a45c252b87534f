//! Typed EventStream rows and their partitioning by (student, material).

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

/// Seconds since the Unix epoch, read as naive local time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Timestamp(pub i64);

impl Timestamp {
    pub fn seconds_since(self, earlier: Timestamp) -> i64 {
        self.0 - earlier.0
    }
}

/// One parsed EventStream row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    pub user_id: String,
    pub contents_id: String,
    pub operation_name: String,
    pub page_no: u32,
    pub marker: Option<String>,
    pub memo_length: u32,
    pub device_code: String,
    pub event_time: Timestamp,
}

impl Event {
    /// Convenience constructor for the fields the tokenizer actually reads.
    pub fn new(user_id: &str, contents_id: &str, operation_name: &str, event_time: Timestamp) -> Self {
        Event {
            user_id: user_id.into(),
            contents_id: contents_id.into(),
            operation_name: operation_name.into(),
            page_no: 0,
            marker: None,
            memo_length: 0,
            device_code: String::new(),
            event_time,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PartitionKey {
    pub user_id: String,
    pub contents_id: String,
}

/// All events of one student on one material, in time order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventPartition {
    pub key: PartitionKey,
    pub events: Vec<Event>,
}

/// Groups events by `(user_id, contents_id)`.
///
/// Partitions come back ordered by key. Inside a partition events are sorted
/// by timestamp with a stable sort, so rows sharing a second keep file order.
pub fn partition(events: Vec<Event>) -> Vec<EventPartition> {
    let mut groups: BTreeMap<PartitionKey, Vec<Event>> = BTreeMap::new();
    for ev in events {
        let key = PartitionKey {
            user_id: ev.user_id.clone(),
            contents_id: ev.contents_id.clone(),
        };
        groups.entry(key).or_default().push(ev);
    }
    groups
        .into_iter()
        .map(|(key, mut events)| {
            events.sort_by_key(|e| e.event_time);
            EventPartition { key, events }
        })
        .collect()
}

/// Groups events by student only, keeping input order within each student.
pub fn by_user(events: &[Event]) -> BTreeMap<&str, Vec<&Event>> {
    let mut out: BTreeMap<&str, Vec<&Event>> = BTreeMap::new();
    for ev in events {
        out.entry(ev.user_id.as_str()).or_default().push(ev);
    }
    out
}
