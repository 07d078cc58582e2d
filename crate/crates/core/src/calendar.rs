//! Local-time helpers and the holiday calendar.

use std::collections::BTreeSet;

use chrono::{DateTime, Datelike, Duration, NaiveDate, NaiveDateTime, Utc, Weekday};

use crate::error::{Error, Result};

/// Default fixed offset from UTC used for local calendar fields (Athens standard time).
pub const DEFAULT_UTC_OFFSET_HOURS: i32 = 2;

const DEFAULT_HOLIDAYS: &str = include_str!("../data/greek_holidays.txt");

/// Wall-clock time at a fixed offset from UTC.
pub fn local_time(ts: DateTime<Utc>, utc_offset_hours: i32) -> NaiveDateTime {
    ts.naive_utc() + Duration::hours(i64::from(utc_offset_hours))
}

/// UTC instant of a local wall-clock time.
pub fn utc_from_local(local: NaiveDateTime, utc_offset_hours: i32) -> DateTime<Utc> {
    (local - Duration::hours(i64::from(utc_offset_hours))).and_utc()
}

/// National holidays plus the always-on weekend rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HolidayCalendar {
    dates: BTreeSet<NaiveDate>,
}

impl HolidayCalendar {
    /// Calendar containing only the weekend rule.
    pub fn weekends_only() -> Self {
        HolidayCalendar {
            dates: BTreeSet::new(),
        }
    }

    pub fn from_dates(dates: impl IntoIterator<Item = NaiveDate>) -> Self {
        HolidayCalendar {
            dates: dates.into_iter().collect(),
        }
    }

    /// Parses one ISO date per line; blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut dates = BTreeSet::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let date = NaiveDate::parse_from_str(line, "%Y-%m-%d").map_err(|e| {
                Error::Config(format!(
                    "holiday calendar line {}: `{line}` is not an ISO date ({e})",
                    lineno + 1
                ))
            })?;
            dates.insert(date);
        }
        Ok(HolidayCalendar { dates })
    }

    pub fn national_dates(&self) -> impl Iterator<Item = &NaiveDate> {
        self.dates.iter()
    }

    pub fn is_holiday(&self, date: NaiveDate) -> bool {
        matches!(date.weekday(), Weekday::Sat | Weekday::Sun) || self.dates.contains(&date)
    }
}

impl Default for HolidayCalendar {
    /// Greek national holidays for 2017-2020.
    fn default() -> Self {
        HolidayCalendar::parse(DEFAULT_HOLIDAYS).expect("bundled holiday calendar is well-formed")
    }
}
