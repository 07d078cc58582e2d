//! Seeded synthetic sensor data with the same schema and broad statistics as
//! a 10-minute office-building HVAC log: room temperature between roughly
//! 14 and 40 °C with yearly and daily cycles, weekend/holiday warming, a
//! slowly wandering component, and 0.5 °C sensor quantization.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use chrono::{Datelike, Duration, NaiveDate, NaiveDateTime, Timelike};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::table::{TimeTable, DEFAULT_INTERVAL_SECS};
use crate::calendar::{utc_from_local, HolidayCalendar, DEFAULT_UTC_OFFSET_HOURS};
use crate::columns;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub seed: u64,
    pub n_days: u32,
    /// First local date; generation starts at its local midnight.
    pub start: NaiveDate,
    pub utc_offset_hours: i32,
    /// Mean room temperature, °C.
    pub rt_base: f64,
    /// Amplitude of the yearly cycle, °C.
    pub seasonal_amp: f64,
    /// Amplitude of the daily cycle, °C.
    pub daily_amp: f64,
    /// Offset added on weekends and national holidays, °C.
    pub holiday_shift: f64,
    /// Marginal standard deviation of the AR(1) wander, °C.
    pub noise_sd: f64,
    /// Per-sample AR(1) coefficient of the wander.
    pub ar_coef: f64,
    /// Strength of the HVAC pull on room temperature while the system is on, °C.
    pub hvac_effect: f64,
    /// Sensor resolution, °C.
    pub quantization: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            seed: 42,
            // 2017-12-08 ..= 2020-02-29
            n_days: 814,
            start: NaiveDate::from_ymd_opt(2017, 12, 8).expect("valid date"),
            utc_offset_hours: DEFAULT_UTC_OFFSET_HOURS,
            rt_base: 25.0,
            seasonal_amp: 4.0,
            daily_amp: 1.5,
            holiday_shift: 1.0,
            noise_sd: 1.5,
            ar_coef: 0.995,
            hvac_effect: 1.5,
            quantization: 0.5,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_days < 1 {
            return Err(Error::Parameter("n_days must be at least 1".into()));
        }
        if !(self.quantization > 0.0) {
            return Err(Error::Parameter("quantization must be positive".into()));
        }
        if !(self.noise_sd >= 0.0) {
            return Err(Error::Parameter("noise_sd must be non-negative".into()));
        }
        if !(self.ar_coef.abs() < 1.0) {
            return Err(Error::Parameter("ar_coef must lie in (-1, 1)".into()));
        }
        Ok(())
    }

    /// Yearly plus daily cycle at a local wall-clock time, before holiday,
    /// HVAC and noise terms.
    pub fn cyclic_component(&self, local: NaiveDateTime) -> f64 {
        self.rt_base
            + self.seasonal_amp * yearly_wave(local)
            + self.daily_amp * daily_wave(local, 8.0)
    }
}

/// Rounds to the nearest multiple of `step`.
pub fn quantize(value: f64, step: f64) -> f64 {
    (value / step).round() * step
}

fn day_number(local: NaiveDateTime) -> f64 {
    let epoch = NaiveDate::from_ymd_opt(2000, 1, 1)
        .expect("valid date")
        .and_hms_opt(0, 0, 0)
        .expect("valid time");
    (local - epoch).num_seconds() as f64 / 86_400.0
}

/// Unit yearly sinusoid peaking in mid-July.
fn yearly_wave(local: NaiveDateTime) -> f64 {
    (2.0 * PI * (day_number(local) - 105.0) / 365.25).sin()
}

/// Unit daily sinusoid crossing zero upwards at `rise_hour`.
fn daily_wave(local: NaiveDateTime, rise_hour: f64) -> f64 {
    let hour = local.hour() as f64 + local.minute() as f64 / 60.0;
    (2.0 * PI * (hour - rise_hour) / 24.0).sin()
}

fn op_mode(month: u32) -> f64 {
    match month {
        5..=9 => 2.0,
        11 | 12 | 1..=3 => 1.0,
        _ => 0.0,
    }
}

struct Ar1 {
    coef: f64,
    innovation_sd: f64,
    state: f64,
}

impl Ar1 {
    fn new(coef: f64, marginal_sd: f64, rng: &mut ChaCha8Rng) -> Self {
        let z: f64 = StandardNormal.sample(rng);
        Ar1 {
            coef,
            innovation_sd: marginal_sd * (1.0 - coef * coef).sqrt(),
            state: marginal_sd * z,
        }
    }

    fn step(&mut self, rng: &mut ChaCha8Rng) -> f64 {
        let z: f64 = StandardNormal.sample(rng);
        self.state = self.coef * self.state + self.innovation_sd * z;
        self.state
    }
}

/// Generates `n_days` of 10-minute data starting at the configured local midnight.
pub fn synthesize(config: &SynthConfig) -> Result<TimeTable> {
    synthesize_with_calendar(config, &HolidayCalendar::default())
}

pub fn synthesize_with_calendar(
    config: &SynthConfig,
    calendar: &HolidayCalendar,
) -> Result<TimeTable> {
    config.validate()?;
    let steps_per_day = (86_400 / DEFAULT_INTERVAL_SECS) as usize;
    let n = config.n_days as usize * steps_per_day;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let start = config.start.and_hms_opt(0, 0, 0).expect("midnight exists");
    let mut rt_wander = Ar1::new(config.ar_coef, config.noise_sd, &mut rng);
    let mut weather = Ar1::new(0.99, 1.5, &mut rng);
    let mut humid_noise = Ar1::new(0.97, 5.0, &mut rng);

    let mut timestamps = Vec::with_capacity(n);
    let mut on_off = Vec::with_capacity(n);
    let mut mode = Vec::with_capacity(n);
    let mut out_temp = Vec::with_capacity(n);
    let mut out_humid = Vec::with_capacity(n);
    let mut setpoint = Vec::with_capacity(n);
    let mut rt = Vec::with_capacity(n);

    let mut hvac_state = 0.0;
    let mut day_schedule = (0.0, 0.0);
    let mut day_setpoint = 22.0;
    for i in 0..n {
        let local = start + Duration::seconds(i as i64 * DEFAULT_INTERVAL_SECS);
        let date = local.date();
        let holiday = calendar.is_holiday(date);
        if i % steps_per_day == 0 {
            // Daily operating window in fractional hours, drawn once per day.
            day_schedule = if !holiday {
                let on = 7.0 + (rng.random_range(0..12) as f64) / 6.0;
                let off = 17.0 + (rng.random_range(0..18) as f64) / 6.0;
                (on, off)
            } else if rng.random::<f64>() < 0.05 {
                (10.0, 14.0)
            } else {
                (0.0, 0.0)
            };
            let base_sp = if op_mode(date.month()) == 2.0 { 22.0 } else { 21.0 };
            day_setpoint = if rng.random::<f64>() < 0.2 {
                base_sp + if rng.random::<bool>() { 1.0 } else { -1.0 }
            } else {
                base_sp
            };
        }
        let hour = local.hour() as f64 + local.minute() as f64 / 60.0;
        let is_on = hour >= day_schedule.0 && hour < day_schedule.1;
        let mode_now = op_mode(date.month());

        let pull = match (is_on, mode_now as u8) {
            (false, _) => 0.0,
            (true, 2) => -config.hvac_effect,
            (true, 1) => 0.6 * config.hvac_effect,
            (true, _) => -0.3 * config.hvac_effect,
        };
        hvac_state += 0.15 * (pull - hvac_state);

        let temp_out = 17.0 + 8.0 * yearly_wave(local) + 5.0 * daily_wave(local, 9.0)
            + weather.step(&mut rng);
        let humid = (60.0 - 1.8 * (temp_out - 17.0) + humid_noise.step(&mut rng)).clamp(10.0, 100.0);

        let wander = rt_wander.step(&mut rng);
        let value = config.cyclic_component(local)
            + if holiday { config.holiday_shift } else { 0.0 }
            + hvac_state
            + wander;

        timestamps.push(utc_from_local(local, config.utc_offset_hours));
        on_off.push(if is_on { 1.0 } else { 0.0 });
        mode.push(mode_now);
        out_temp.push(quantize(temp_out, 0.1));
        out_humid.push(quantize(humid, 0.1));
        setpoint.push(day_setpoint);
        rt.push(quantize(value, config.quantization));
    }

    let mut cols = BTreeMap::new();
    cols.insert(columns::ON_OFF.to_string(), on_off);
    cols.insert(columns::OP_MODE.to_string(), mode);
    cols.insert(columns::OUT_TEMP.to_string(), out_temp);
    cols.insert(columns::OUT_HUMID.to_string(), out_humid);
    cols.insert(columns::SETPOINT.to_string(), setpoint);
    TimeTable::new(timestamps, cols, rt, DEFAULT_INTERVAL_SECS)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calendar::local_time;

    fn small(days: u32) -> SynthConfig {
        SynthConfig {
            n_days: days,
            ..SynthConfig::default()
        }
    }

    #[test]
    fn same_seed_is_bit_identical() {
        let a = synthesize(&small(10)).unwrap();
        let b = synthesize(&small(10)).unwrap();
        assert_eq!(a, b);
        let c = synthesize(&SynthConfig { seed: 7, ..small(10) }).unwrap();
        assert_ne!(a.target(), c.target());
    }

    #[test]
    fn noise_free_target_is_quantized_sinusoid_sum() {
        let cfg = SynthConfig {
            noise_sd: 0.0,
            holiday_shift: 0.0,
            hvac_effect: 0.0,
            ..small(20)
        };
        let t = synthesize(&cfg).unwrap();
        for (ts, &y) in t.timestamps().iter().zip(t.target()) {
            let local = local_time(*ts, cfg.utc_offset_hours);
            let day = (local - NaiveDate::from_ymd_opt(2000, 1, 1).unwrap().and_hms_opt(0, 0, 0).unwrap())
                .num_seconds() as f64
                / 86_400.0;
            let hour = local.hour() as f64 + local.minute() as f64 / 60.0;
            let expected = 25.0
                + 4.0 * (2.0 * PI * (day - 105.0) / 365.25).sin()
                + 1.5 * (2.0 * PI * (hour - 8.0) / 24.0).sin();
            assert_eq!(y, quantize(expected, 0.5));
        }
    }

    #[test]
    fn shape_and_quantization() {
        let t = synthesize(&small(3)).unwrap();
        assert_eq!(t.len(), 3 * 144);
        assert_eq!(t.interval_secs(), 600);
        for &y in t.target() {
            assert_eq!((y / 0.5).fract(), 0.0);
        }
        let names: Vec<_> = t.column_names().collect();
        for c in [columns::ON_OFF, columns::OP_MODE, columns::OUT_TEMP, columns::OUT_HUMID] {
            assert!(names.contains(&c));
        }
        let first = local_time(t.timestamps()[0], 2);
        assert_eq!(first.to_string(), "2017-12-08 00:00:00");
    }

    #[test]
    fn humidity_falls_as_outdoor_temperature_rises() {
        let t = synthesize(&small(120)).unwrap();
        let x = t.column(columns::OUT_TEMP).unwrap();
        let y = t.column(columns::OUT_HUMID).unwrap();
        let n = x.len() as f64;
        let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
        let cov: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
        assert!(cov < 0.0);
    }

    #[test]
    fn rejects_zero_days_and_bad_quantization() {
        assert!(synthesize(&small(0)).is_err());
        assert!(synthesize(&SynthConfig { quantization: 0.0, ..small(1) }).is_err());
        assert!(synthesize(&SynthConfig { noise_sd: -1.0, ..small(1) }).is_err());
    }
}
