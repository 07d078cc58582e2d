use chrono::{Datelike, Timelike};

use crate::calendar::{local_time, HolidayCalendar};
use crate::columns;
use crate::dataio::TimeTable;
use crate::error::Result;

/// Adds Quarter (1-4), Month (1-12), WeekDay (Monday = 1 .. Sunday = 7) and
/// Hour (0-23) in local time. No Year column is produced.
pub fn add_time_features(table: &TimeTable, utc_offset_hours: i32) -> Result<TimeTable> {
    let locals: Vec<_> = table
        .timestamps()
        .iter()
        .map(|t| local_time(*t, utc_offset_hours))
        .collect();
    let month: Vec<f64> = locals.iter().map(|t| f64::from(t.month())).collect();
    let quarter = locals
        .iter()
        .map(|t| f64::from((t.month() - 1) / 3 + 1))
        .collect();
    let weekday = locals
        .iter()
        .map(|t| f64::from(t.weekday().number_from_monday()))
        .collect();
    let hour = locals.iter().map(|t| f64::from(t.hour())).collect();
    table
        .with_column(columns::QUARTER, quarter)?
        .with_column(columns::MONTH, month)?
        .with_column(columns::WEEKDAY, weekday)?
        .with_column(columns::HOUR, hour)
}

/// Adds a 0/1 column marking weekends and configured national holidays.
pub fn add_holiday(
    table: &TimeTable,
    calendar: &HolidayCalendar,
    utc_offset_hours: i32,
) -> Result<TimeTable> {
    let flags = table
        .timestamps()
        .iter()
        .map(|t| {
            if calendar.is_holiday(local_time(*t, utc_offset_hours).date()) {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    table.with_column(columns::HOLIDAY, flags)
}

/// Adds a 0/1 column that is 1 when the system is on, the day is a working
/// day and the local hour lies in `[start_hour, end_hour)`.
pub fn add_occupancy(table: &TimeTable, working_hours: (u32, u32)) -> Result<TimeTable> {
    let on = table.require(columns::ON_OFF)?;
    let hour = table.require(columns::HOUR)?;
    let holiday = table.require(columns::HOLIDAY)?;
    let (start, end) = (f64::from(working_hours.0), f64::from(working_hours.1));
    let occ = (0..table.len())
        .map(|i| {
            let working = holiday[i] == 0.0 && hour[i] >= start && hour[i] < end;
            if on[i] == 1.0 && working {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    table.with_column(columns::OCCUPANCY, occ)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use chrono::{DateTime, NaiveDate, TimeZone, Utc};
    use std::collections::BTreeMap;

    fn one_row(ts: DateTime<Utc>, on: f64) -> TimeTable {
        let mut cols = BTreeMap::new();
        cols.insert(columns::ON_OFF.to_string(), vec![on]);
        TimeTable::new(vec![ts], cols, vec![22.0], 600).unwrap()
    }

    fn col(t: &TimeTable, name: &str) -> f64 {
        t.column(name).unwrap()[0]
    }

    #[test]
    fn calendar_fields_use_local_time() {
        let ts = Utc.with_ymd_and_hms(2019, 7, 6, 12, 0, 0).unwrap();
        let t = add_time_features(&one_row(ts, 1.0), 2).unwrap();
        assert_eq!(col(&t, columns::QUARTER), 3.0);
        assert_eq!(col(&t, columns::MONTH), 7.0);
        assert_eq!(col(&t, columns::WEEKDAY), 6.0);
        assert_eq!(col(&t, columns::HOUR), 14.0);
        assert!(t.column("Year").is_none());
    }

    #[test]
    fn local_new_year_midnight() {
        // 2019-01-01 00:00 at +2 is 2018-12-31 22:00 UTC.
        let ts = Utc.with_ymd_and_hms(2018, 12, 31, 22, 0, 0).unwrap();
        let t = add_time_features(&one_row(ts, 1.0), 2).unwrap();
        assert_eq!(col(&t, columns::QUARTER), 1.0);
        assert_eq!(col(&t, columns::MONTH), 1.0);
        assert_eq!(col(&t, columns::HOUR), 0.0);
    }

    #[test]
    fn holiday_flags() {
        let cal = HolidayCalendar::from_dates([NaiveDate::from_ymd_opt(2019, 3, 26).unwrap()]);
        let flag = |y, m, d| {
            let ts = Utc.with_ymd_and_hms(y, m, d, 10, 0, 0).unwrap();
            col(&add_holiday(&one_row(ts, 1.0), &cal, 2).unwrap(), columns::HOLIDAY)
        };
        assert_eq!(flag(2019, 7, 6), 1.0); // Saturday
        assert_eq!(flag(2019, 7, 3), 0.0); // Wednesday
        assert_eq!(flag(2019, 3, 26), 1.0); // listed Tuesday
    }

    fn occupancy_at(ts: DateTime<Utc>, on: f64) -> f64 {
        let t = add_time_features(&one_row(ts, on), 2).unwrap();
        let t = add_holiday(&t, &HolidayCalendar::weekends_only(), 2).unwrap();
        col(&add_occupancy(&t, (8, 18)).unwrap(), columns::OCCUPANCY)
    }

    #[test]
    fn occupancy_requires_all_conditions() {
        // 08:00 UTC = 10:00 local.
        let tuesday = Utc.with_ymd_and_hms(2019, 7, 2, 8, 0, 0).unwrap();
        let sunday = Utc.with_ymd_and_hms(2019, 7, 7, 8, 0, 0).unwrap();
        assert_eq!(occupancy_at(tuesday, 1.0), 1.0);
        assert_eq!(occupancy_at(sunday, 1.0), 0.0);
        assert_eq!(occupancy_at(tuesday, 0.0), 0.0);
        let evening = Utc.with_ymd_and_hms(2019, 7, 2, 16, 0, 0).unwrap();
        assert_eq!(occupancy_at(evening, 1.0), 0.0);
    }

    #[test]
    fn occupancy_without_dependencies_is_pipeline_error() {
        let ts = Utc.with_ymd_and_hms(2019, 7, 2, 8, 0, 0).unwrap();
        assert!(matches!(
            add_occupancy(&one_row(ts, 1.0), (8, 18)),
            Err(Error::Pipeline(_))
        ));
    }
}
