//! EventStream CSV reading and writing.
//!
//! Header names are matched after lowercasing and removing spaces and
//! underscores, so `memo length`, `memo_length` and `memolength` all name
//! the same column. Which header name feeds which field is configurable
//! through [`ColumnMap`].

use std::io::{Read, Write};

use chrono::{DateTime, NaiveDateTime};
use e2vec_core::event::{Event, Timestamp};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const TIME_FORMAT: &str = "%Y-%m-%d %H:%M:%S";

/// Header name for each event field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ColumnMap {
    pub user_id: String,
    pub contents_id: String,
    pub operation_name: String,
    pub page_no: String,
    pub marker: String,
    pub memo_length: String,
    pub device_code: String,
    pub event_time: String,
}

impl Default for ColumnMap {
    fn default() -> Self {
        ColumnMap {
            user_id: "userid".into(),
            contents_id: "contentsid".into(),
            operation_name: "operationname".into(),
            page_no: "pageno".into(),
            marker: "marker".into(),
            memo_length: "memolength".into(),
            device_code: "devicecode".into(),
            event_time: "eventtime".into(),
        }
    }
}

impl ColumnMap {
    fn names(&self) -> [&str; 8] {
        [
            &self.user_id,
            &self.contents_id,
            &self.operation_name,
            &self.page_no,
            &self.marker,
            &self.memo_length,
            &self.device_code,
            &self.event_time,
        ]
    }
}

/// Rows that did not become events, by reason.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SkipReport {
    pub bad_timestamp: usize,
    pub missing_id: usize,
    /// Wrong field count or a non-numeric page number or memo length.
    pub malformed: usize,
    /// Header columns that map to no field. They are ignored, not fatal.
    pub unknown_columns: Vec<String>,
}

impl SkipReport {
    pub fn skipped(&self) -> usize {
        self.bad_timestamp + self.missing_id + self.malformed
    }
}

fn normalize(name: &str) -> String {
    name.chars()
        .filter(|c| !c.is_whitespace() && *c != '_')
        .flat_map(char::to_lowercase)
        .collect()
}

pub fn parse_time(text: &str) -> Option<Timestamp> {
    NaiveDateTime::parse_from_str(text.trim(), TIME_FORMAT)
        .ok()
        .map(|t| Timestamp(t.and_utc().timestamp()))
}

pub fn format_time(t: Timestamp) -> String {
    DateTime::from_timestamp(t.0, 0)
        .map(|d| d.naive_utc().format(TIME_FORMAT).to_string())
        .unwrap_or_else(|| t.0.to_string())
}

fn parse_count(text: &str) -> Option<u32> {
    let t = text.trim();
    if t.is_empty() {
        Some(0)
    } else {
        t.parse().ok()
    }
}

/// Reads every row of `source`; rows that fail to parse are counted in the
/// returned report instead of aborting the read.
pub fn parse_events<R: Read>(source: R, columns: &ColumnMap) -> Result<(Vec<Event>, SkipReport)> {
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_reader(source);
    let header: Vec<String> = reader.headers().map_err(csv_error)?.iter().map(normalize).collect();

    let mut index = [None; 8];
    for (slot, name) in index.iter_mut().zip(columns.names()) {
        *slot = header.iter().position(|h| *h == normalize(name));
    }
    let required = [
        (0, &columns.user_id),
        (1, &columns.contents_id),
        (2, &columns.operation_name),
        (7, &columns.event_time),
    ];
    for (i, name) in required {
        if index[i].is_none() {
            return Err(Error::Schema(format!("missing required column {name:?}")));
        }
    }

    let mut report = SkipReport::default();
    let known: Vec<String> = columns.names().iter().map(|n| normalize(n)).collect();
    report.unknown_columns = reader
        .headers()
        .map_err(csv_error)?
        .iter()
        .filter(|h| !known.contains(&normalize(h)))
        .map(String::from)
        .collect();

    let mut events = Vec::new();
    let width = header.len();
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        if record.len() != width {
            report.malformed += 1;
            continue;
        }
        let field = |i: usize| index[i].map_or("", |c| &record[c]);
        let user = field(0).trim();
        let content = field(1).trim();
        if user.is_empty() || content.is_empty() {
            report.missing_id += 1;
            continue;
        }
        let Some(time) = parse_time(field(7)) else {
            report.bad_timestamp += 1;
            continue;
        };
        let (Some(page_no), Some(memo_length)) = (parse_count(field(3)), parse_count(field(5))) else {
            report.malformed += 1;
            continue;
        };
        let marker = field(4);
        events.push(Event {
            user_id: user.into(),
            contents_id: content.into(),
            operation_name: field(2).trim().into(),
            page_no,
            marker: (!marker.is_empty()).then(|| marker.into()),
            memo_length,
            device_code: field(6).trim().into(),
            event_time: time,
        });
    }
    Ok((events, report))
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Stream(io),
        other => Error::Schema(format!("unreadable CSV: {other:?}")),
    }
}

/// Writes events with the default header; `parse_events` reads the output
/// back to identical events.
pub fn write_events<'a, W, I>(sink: W, events: I) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a Event>,
{
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(ColumnMap::default().names()).map_err(csv_error)?;
    for e in events {
        w.write_record([
            e.user_id.as_str(),
            &e.contents_id,
            &e.operation_name,
            &e.page_no.to_string(),
            e.marker.as_deref().unwrap_or(""),
            &e.memo_length.to_string(),
            &e.device_code,
            &format_time(e.event_time),
        ])
        .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}
