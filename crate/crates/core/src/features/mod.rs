//! Feature engineering: smoothing, calendar and holiday indicators,
//! occupancy, the historical room-temperature feature, and design matrices.

mod calendar_features;
mod design;
mod mva;
mod mvart;

use serde::{Deserialize, Serialize};

pub use calendar_features::{add_holiday, add_occupancy, add_time_features};
pub use design::{
    FeatureGroup, FeatureMatrix, FeatureMeans, FeatureSelection, OUT_HUMID_MVA, OUT_TEMP_MVA,
};
pub use mva::moving_average;
pub use mvart::{add_mvart, mvart_series, MvartSource};

pub(crate) use design::matrix_from_table;
pub(crate) use mva::window_mean;

use crate::calendar::{HolidayCalendar, DEFAULT_UTC_OFFSET_HOURS};
use crate::columns;
use crate::dataio::TimeTable;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MvartMode {
    Oracle,
    Rolling,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EngineeringConfig {
    /// MVA width in samples for MVART and the smoothed outdoor signals.
    pub mva_window: usize,
    /// Forecast horizon in samples.
    pub horizon_steps: usize,
    pub holidays: HolidayCalendar,
    pub mvart_mode: MvartMode,
    /// Local working hours `[start, end)` used by the occupancy indicator.
    pub working_hours: (u32, u32),
    pub utc_offset_hours: i32,
}

impl Default for EngineeringConfig {
    fn default() -> Self {
        EngineeringConfig {
            mva_window: 6,
            horizon_steps: 48,
            holidays: HolidayCalendar::default(),
            mvart_mode: MvartMode::Oracle,
            working_hours: (8, 18),
            utc_offset_hours: DEFAULT_UTC_OFFSET_HOURS,
        }
    }
}

impl EngineeringConfig {
    pub fn validate(&self) -> Result<()> {
        if self.mva_window < 1 {
            return Err(Error::Parameter("mva_window must be at least 1".into()));
        }
        if self.horizon_steps < 1 {
            return Err(Error::Parameter("horizon_steps must be at least 1".into()));
        }
        if self.working_hours.0 >= self.working_hours.1 || self.working_hours.1 > 24 {
            return Err(Error::Parameter(format!(
                "working hours {:?} are not a valid [start, end) range",
                self.working_hours
            )));
        }
        Ok(())
    }
}

/// Adds every engineered column: calendar fields, holiday, occupancy,
/// smoothed outdoor signals and oracle MVART.
///
/// Rolling-mode MVART is produced by the forecast module, which owns the
/// anchors and the model's predictions.
pub fn engineer(table: &TimeTable, config: &EngineeringConfig) -> Result<TimeTable> {
    config.validate()?;
    let t = add_time_features(table, config.utc_offset_hours)?;
    let t = add_holiday(&t, &config.holidays, config.utc_offset_hours)?;
    let t = add_occupancy(&t, config.working_hours)?;
    let temp = moving_average(t.require(columns::OUT_TEMP)?, config.mva_window)?;
    let humid = moving_average(t.require(columns::OUT_HUMID)?, config.mva_window)?;
    let t = t
        .with_column(OUT_TEMP_MVA, temp)?
        .with_column(OUT_HUMID_MVA, humid)?;
    add_mvart(&t, config.mva_window, MvartSource::Oracle)
}

/// Number of leading rows without a full MVART window.
pub fn warmup_rows(config: &EngineeringConfig) -> usize {
    config.mva_window
}

/// Builds the model input for an engineered table.
///
/// Each row's target is the room temperature at the same instant; forecasting
/// further ahead happens by recursion in the forecast module. The first
/// `mva_window` rows are dropped whatever the selection, so matrices built
/// with different selections cover the same instants.
pub fn build_design_matrix(
    table: &TimeTable,
    config: &EngineeringConfig,
    selection: &FeatureSelection,
) -> Result<FeatureMatrix> {
    config.validate()?;
    let names = selection.resolve()?;
    let m = matrix_from_table(table, &names, warmup_rows(config))?;
    if let Some(i) = m.rows().position(|r| r.iter().any(|v| !v.is_finite())) {
        return Err(Error::Pipeline(format!(
            "row at {} still lacks history after warm-up",
            m.timestamps()[i].to_rfc3339()
        )));
    }
    Ok(m)
}
