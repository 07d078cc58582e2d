//! Rolling multi-step forecasting with periodic re-anchoring on true values,
//! and the window and interval sweeps built on it.

mod rolling;
mod sweep;

pub use rolling::{
    anchor_rows, rolling_forecast, rolling_forecast_substituted, with_history, ForecastConfig,
    ForecastRun,
};
pub use sweep::{horizon_sweep, window_setup, window_sweep, write_sweep_csv, SweepRow, Tuning};
