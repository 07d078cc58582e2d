use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::table::TimeTable;
use crate::calendar::{local_time, DEFAULT_UTC_OFFSET_HOURS};
use crate::error::{Error, Result};

/// Calendar boundaries of the train / validation / test partition.
///
/// All dates are local dates and inclusive: a boundary date's rows belong to
/// the earlier partition. Rows before `data_start` or after `data_cutoff`
/// are dropped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub data_start: NaiveDate,
    pub train_end: NaiveDate,
    pub val_end: NaiveDate,
    pub data_cutoff: NaiveDate,
    pub utc_offset_hours: i32,
}

impl Default for SplitSpec {
    fn default() -> Self {
        let d = |y, m, day| NaiveDate::from_ymd_opt(y, m, day).expect("valid date");
        SplitSpec {
            data_start: d(2017, 12, 8),
            train_end: d(2019, 6, 30),
            val_end: d(2019, 10, 10),
            data_cutoff: d(2020, 2, 29),
            utc_offset_hours: DEFAULT_UTC_OFFSET_HOURS,
        }
    }
}

impl SplitSpec {
    pub fn validate(&self) -> Result<()> {
        if self.train_end <= self.data_start {
            return Err(Error::Split(format!(
                "empty train partition: train_end {} must be after data_start {}",
                self.train_end, self.data_start
            )));
        }
        if self.val_end <= self.train_end {
            return Err(Error::Split(format!(
                "empty validation partition: val_end {} must be after train_end {}",
                self.val_end, self.train_end
            )));
        }
        if self.data_cutoff <= self.val_end {
            return Err(Error::Split(format!(
                "empty test partition: data_cutoff {} must be after val_end {}",
                self.data_cutoff, self.val_end
            )));
        }
        Ok(())
    }
}

/// The three partitions produced by [`split`].
#[derive(Debug, Clone, PartialEq)]
pub struct Splits {
    pub train: TimeTable,
    pub validation: TimeTable,
    pub test: TimeTable,
}

/// Partitions a table at the date boundaries in `spec`.
pub fn split(table: &TimeTable, spec: &SplitSpec) -> Result<Splits> {
    spec.validate()?;
    let date_of = |i: usize| local_time(table.timestamps()[i], spec.utc_offset_hours).date();
    if table.is_empty() {
        return Err(Error::Split("cannot split an empty table".into()));
    }
    let (first, last) = (date_of(0), date_of(table.len() - 1));
    if spec.data_start < first || spec.data_cutoff > last {
        return Err(Error::Split(format!(
            "split dates {}..{} fall outside the table's range {first}..{last}",
            spec.data_start, spec.data_cutoff
        )));
    }
    // Local dates are non-decreasing along the grid, so each boundary is a
    // single partition point.
    let boundary = |pred: &dyn Fn(NaiveDate) -> bool| {
        let mut lo = 0;
        let mut hi = table.len();
        while lo < hi {
            let mid = (lo + hi) / 2;
            if pred(date_of(mid)) {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        lo
    };
    let start = boundary(&|d| d < spec.data_start);
    let train_end = boundary(&|d| d <= spec.train_end);
    let val_end = boundary(&|d| d <= spec.val_end);
    let cutoff = boundary(&|d| d <= spec.data_cutoff);

    let part = |name: &str, lo: usize, hi: usize| {
        if hi <= lo {
            Err(Error::Split(format!("{name} partition is empty")))
        } else {
            Ok(table.slice(lo..hi))
        }
    };
    Ok(Splits {
        train: part("train", start, train_end)?,
        validation: part("validation", train_end, val_end)?,
        test: part("test", val_end, cutoff)?,
    })
}
