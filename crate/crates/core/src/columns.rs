//! Column names shared across the pipeline.

pub const ON_OFF: &str = "OnOffState";
/// Operation mode: ventilation = 0, heating = 1, cooling = 2.
pub const OP_MODE: &str = "OpMode";
pub const OUT_TEMP: &str = "OutTemp";
pub const OUT_HUMID: &str = "OutHumid";
pub const SETPOINT: &str = "SetpointTemperature";

pub const QUARTER: &str = "Quarter";
pub const MONTH: &str = "Month";
pub const WEEKDAY: &str = "WeekDay";
pub const HOUR: &str = "Hour";
pub const HOLIDAY: &str = "Holiday";
pub const OCCUPANCY: &str = "Occupancy";
pub const MVART: &str = "MVART";

/// Never admitted into a design matrix.
pub const EXCLUDED: [&str; 2] = [SETPOINT, "Year"];
