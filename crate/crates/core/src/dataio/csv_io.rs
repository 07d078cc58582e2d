//! CSV ingestion and export.
//!
//! Files carry a header row, an ISO-8601 `timestamp` column and numeric
//! columns with `.` as the decimal point. A [`Schema`] maps header names to
//! roles; it is written as `name=role` lines:
//!
//! ```text
//! # role is one of: timestamp, target, feature, feature:<NewName>, ignore
//! timestamp=timestamp
//! room_temp=target
//! oat=feature:OutTemp
//! alarm=ignore
//! ```
//!
//! Columns not mentioned in the schema are ingested as features under their
//! own names.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use chrono::{DateTime, NaiveDateTime, Utc};

use super::table::{TimeTable, DEFAULT_INTERVAL_SECS, TARGET_COLUMN};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Role {
    Timestamp,
    Target,
    /// Feature stored under the given name.
    Feature(String),
    Ignore,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schema {
    /// Explicit header name → role assignments.
    pub roles: BTreeMap<String, Role>,
    /// Expected sampling interval; rows must lie on this grid.
    pub interval_secs: i64,
}

impl Default for Schema {
    fn default() -> Self {
        let mut roles = BTreeMap::new();
        roles.insert("timestamp".to_string(), Role::Timestamp);
        roles.insert(TARGET_COLUMN.to_string(), Role::Target);
        Schema {
            roles,
            interval_secs: DEFAULT_INTERVAL_SECS,
        }
    }
}

impl Schema {
    /// Parses the `name=role` text form. `interval=<seconds>` sets the grid spacing.
    pub fn parse(text: &str) -> Result<Schema> {
        let mut roles = BTreeMap::new();
        let mut interval_secs = DEFAULT_INTERVAL_SECS;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (name, role) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("schema line {}: expected name=role", lineno + 1))
            })?;
            let (name, role) = (name.trim(), role.trim());
            if name == "interval" {
                interval_secs = role.parse().map_err(|_| {
                    Error::Config(format!("schema line {}: bad interval `{role}`", lineno + 1))
                })?;
                continue;
            }
            let role = match role {
                "timestamp" => Role::Timestamp,
                "target" => Role::Target,
                "feature" => Role::Feature(name.to_string()),
                "ignore" => Role::Ignore,
                other => match other.strip_prefix("feature:") {
                    Some(renamed) if !renamed.trim().is_empty() => {
                        Role::Feature(renamed.trim().to_string())
                    }
                    _ => {
                        return Err(Error::Config(format!(
                            "schema line {}: unknown role `{other}`",
                            lineno + 1
                        )))
                    }
                },
            };
            roles.insert(name.to_string(), role);
        }
        let count = |r: &Role| roles.values().filter(|x| *x == r).count();
        if count(&Role::Timestamp) != 1 || count(&Role::Target) != 1 {
            return Err(Error::Config(
                "schema must name exactly one timestamp column and one target column".into(),
            ));
        }
        Ok(Schema {
            roles,
            interval_secs,
        })
    }

    fn role_of(&self, header: &str) -> Role {
        self.roles
            .get(header)
            .cloned()
            .unwrap_or_else(|| Role::Feature(header.to_string()))
    }
}

/// Parses an ISO-8601 timestamp. Values without an offset are taken as UTC.
pub fn parse_timestamp(s: &str) -> Option<DateTime<Utc>> {
    let s = s.trim();
    if let Ok(t) = DateTime::parse_from_rfc3339(s) {
        return Some(t.with_timezone(&Utc));
    }
    ["%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M:%S", "%Y-%m-%dT%H:%M", "%Y-%m-%d %H:%M"]
        .iter()
        .find_map(|fmt| NaiveDateTime::parse_from_str(s, fmt).ok())
        .map(|t| t.and_utc())
}

/// Reads a CSV byte stream into a [`TimeTable`], sorting rows by timestamp.
pub fn ingest_csv<R: Read>(source: R, schema: &Schema) -> Result<TimeTable> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(source);
    let headers = reader.headers()?.clone();

    for (name, role) in &schema.roles {
        if *role != Role::Ignore && !headers.iter().any(|h| h == name) {
            return Err(Error::Schema(format!("required column `{name}` is missing")));
        }
    }

    let mut ts_index = None;
    let mut target_index = None;
    let mut features: Vec<(usize, String)> = Vec::new();
    for (i, h) in headers.iter().enumerate() {
        match schema.role_of(h) {
            Role::Timestamp => ts_index = Some(i),
            Role::Target => target_index = Some(i),
            Role::Feature(name) => {
                if features.iter().any(|(_, n)| *n == name) {
                    return Err(Error::Schema(format!("feature `{name}` declared twice")));
                }
                features.push((i, name));
            }
            Role::Ignore => {}
        }
    }
    let ts_index = ts_index.ok_or_else(|| Error::Schema("no timestamp column".into()))?;
    let target_index = target_index.ok_or_else(|| Error::Schema("no target column".into()))?;

    let mut rows: Vec<(DateTime<Utc>, f64, Vec<f64>)> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record?;
        let field = |idx: usize| record.get(idx).unwrap_or("");
        let ts = parse_timestamp(field(ts_index)).ok_or_else(|| Error::Parse {
            row,
            message: format!("`{}` is not an ISO-8601 timestamp", field(ts_index)),
        })?;
        let number = |idx: usize, name: &str| -> Result<f64> {
            let raw = field(idx);
            raw.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Parse {
                    row,
                    message: format!("column `{name}` value `{raw}` is not a number"),
                })
        };
        let target = number(target_index, &headers[target_index])?;
        let values = features
            .iter()
            .map(|(idx, _)| number(*idx, &headers[*idx]))
            .collect::<Result<Vec<_>>>()?;
        rows.push((ts, target, values));
    }
    if rows.is_empty() {
        return Err(Error::EmptyData);
    }

    rows.sort_by_key(|r| r.0);
    if let Some(pair) = rows.windows(2).find(|p| p[0].0 == p[1].0) {
        return Err(Error::Integrity(format!(
            "duplicate timestamp {}",
            pair[0].0.to_rfc3339()
        )));
    }

    let timestamps = rows.iter().map(|r| r.0).collect();
    let target = rows.iter().map(|r| r.1).collect();
    let columns = features
        .iter()
        .enumerate()
        .map(|(j, (_, name))| (name.clone(), rows.iter().map(|r| r.2[j]).collect()))
        .collect();
    TimeTable::new(timestamps, columns, target, schema.interval_secs)
}

/// Writes a table in the same CSV layout [`ingest_csv`] reads with the default schema.
pub fn write_csv<W: Write>(table: &TimeTable, sink: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    let mut header = vec!["timestamp".to_string()];
    header.extend(table.column_names().map(str::to_string));
    header.push(TARGET_COLUMN.to_string());
    w.write_record(&header)?;
    let columns: Vec<&[f64]> = table.columns().values().map(Vec::as_slice).collect();
    for i in 0..table.len() {
        let mut record = Vec::with_capacity(header.len());
        record.push(table.timestamps()[i].format("%Y-%m-%dT%H:%M:%SZ").to_string());
        record.extend(columns.iter().map(|c| c[i].to_string()));
        record.push(table.target()[i].to_string());
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}
