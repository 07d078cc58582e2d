//! Flat `key = value` run configuration with section prefixes
//! (`gbm.max_depth = 8`). Defaults come from the library types; a config
//! file and then command-line settings override them.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use chrono::{NaiveDate, TimeDelta};

use crate::calendar::HolidayCalendar;
use crate::dataio::{ingest_csv, synthesize_with_calendar, Schema, SplitSpec, SynthConfig, TimeTable};
use crate::error::{Error, Result};
use crate::features::{EngineeringConfig, FeatureSelection};
use crate::forecast::ForecastConfig;
use crate::gbm::{GridRanges, Hyperparams};

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

/// Every recognized key with its default value.
pub fn default_settings() -> BTreeMap<String, String> {
    let synth = SynthConfig::default();
    let split = SplitSpec::default();
    let eng = EngineeringConfig::default();
    let hp = Hyperparams::default();
    let grid = GridRanges::default();
    let fc = ForecastConfig::default();
    let pairs: Vec<(&str, String)> = vec![
        ("seed", synth.seed.to_string()),
        ("time.utc_offset_hours", synth.utc_offset_hours.to_string()),
        ("data.source", "synth".into()),
        ("data.csv", String::new()),
        ("data.schema", String::new()),
        ("data.holidays", String::new()),
        ("synth.days", synth.n_days.to_string()),
        ("synth.start", synth.start.to_string()),
        ("synth.rt_base", synth.rt_base.to_string()),
        ("synth.seasonal_amp", synth.seasonal_amp.to_string()),
        ("synth.daily_amp", synth.daily_amp.to_string()),
        ("synth.holiday_shift", synth.holiday_shift.to_string()),
        ("synth.noise_sd", synth.noise_sd.to_string()),
        ("synth.ar_coef", synth.ar_coef.to_string()),
        ("synth.hvac_effect", synth.hvac_effect.to_string()),
        ("synth.quantization", synth.quantization.to_string()),
        ("split.data_start", split.data_start.to_string()),
        ("split.train_end", split.train_end.to_string()),
        ("split.val_end", split.val_end.to_string()),
        ("split.data_cutoff", split.data_cutoff.to_string()),
        ("features.groups", "IOTS-MVA,MVART,Holiday".into()),
        ("features.mva_window", eng.mva_window.to_string()),
        ("features.working_hours", format!("{}-{}", eng.working_hours.0, eng.working_hours.1)),
        ("gbm.max_depth", hp.max_depth.to_string()),
        ("gbm.n_trees", hp.n_trees.to_string()),
        ("gbm.gamma", hp.gamma.to_string()),
        ("gbm.lambda", hp.lambda.to_string()),
        ("gbm.learning_rate", hp.learning_rate.to_string()),
        ("grid.max_depth", join(&grid.max_depth)),
        ("grid.n_trees", join(&grid.n_trees)),
        ("grid.gamma", join(&grid.gamma)),
        ("grid.lambda", join(&grid.lambda)),
        ("grid.learning_rate", join(&grid.learning_rate)),
        ("forecast.access_minutes", fc.access_interval.num_minutes().to_string()),
        ("forecast.horizon_minutes", fc.horizon.num_minutes().to_string()),
        ("forecast.anchor_hour", fc.anchor_hour.to_string()),
    ];
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

/// Applies `key = value` lines; `#` starts a comment.
pub fn apply_text(settings: &mut BTreeMap<String, String>, text: &str, origin: &str) -> Result<()> {
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!("{origin} line {}: expected key = value", lineno + 1))
        })?;
        set(settings, k.trim(), v.trim()).map_err(|e| Error::Config(format!("{origin} line {}: {e}", lineno + 1)))?;
    }
    Ok(())
}

/// Overrides one known key.
pub fn set(settings: &mut BTreeMap<String, String>, key: &str, value: &str) -> Result<()> {
    match settings.get_mut(key) {
        Some(slot) => {
            *slot = value.to_string();
            Ok(())
        }
        None => Err(Error::Config(format!("unknown configuration key `{key}`"))),
    }
}

#[derive(Debug, Clone)]
pub enum DataSource {
    Synth,
    Csv { path: PathBuf, schema: Option<PathBuf> },
}

/// Typed view of the settings.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub settings: BTreeMap<String, String>,
    pub seed: u64,
    pub source: DataSource,
    pub synth: SynthConfig,
    pub split: SplitSpec,
    pub engineering: EngineeringConfig,
    pub selection: FeatureSelection,
    pub hyperparams: Hyperparams,
    pub grid: GridRanges,
    pub forecast: ForecastConfig,
}

fn parse<T: std::str::FromStr>(s: &BTreeMap<String, String>, key: &str) -> Result<T> {
    let raw = &s[key];
    raw.parse()
        .map_err(|_| Error::Config(format!("`{key}`: cannot parse `{raw}`")))
}

fn parse_list<T: std::str::FromStr>(s: &BTreeMap<String, String>, key: &str) -> Result<Vec<T>> {
    s[key]
        .split(',')
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|_| Error::Config(format!("`{key}`: cannot parse `{}`", p.trim())))
        })
        .collect()
}

fn parse_date(s: &BTreeMap<String, String>, key: &str) -> Result<NaiveDate> {
    NaiveDate::parse_from_str(&s[key], "%Y-%m-%d")
        .map_err(|_| Error::Config(format!("`{key}`: expected YYYY-MM-DD, got `{}`", s[key])))
}

fn optional_path(s: &BTreeMap<String, String>, key: &str) -> Option<PathBuf> {
    let v = s[key].trim();
    (!v.is_empty()).then(|| PathBuf::from(v))
}

fn read(path: &Path, what: &str) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {what} {}: {e}", path.display())))
}

impl PipelineConfig {
    pub fn from_settings(settings: BTreeMap<String, String>) -> Result<PipelineConfig> {
        let s = &settings;
        let seed: u64 = parse(s, "seed")?;
        let offset: i32 = parse(s, "time.utc_offset_hours")?;
        let holidays = match optional_path(s, "data.holidays") {
            Some(p) => HolidayCalendar::parse(&read(&p, "holiday file")?)?,
            None => HolidayCalendar::default(),
        };
        let source = match s["data.source"].as_str() {
            "synth" => DataSource::Synth,
            "csv" => DataSource::Csv {
                path: optional_path(s, "data.csv")
                    .ok_or_else(|| Error::Config("data.source = csv needs data.csv".into()))?,
                schema: optional_path(s, "data.schema"),
            },
            other => {
                return Err(Error::Config(format!(
                    "data.source must be `synth` or `csv`, got `{other}`"
                )))
            }
        };
        let synth = SynthConfig {
            seed,
            n_days: parse(s, "synth.days")?,
            start: parse_date(s, "synth.start")?,
            utc_offset_hours: offset,
            rt_base: parse(s, "synth.rt_base")?,
            seasonal_amp: parse(s, "synth.seasonal_amp")?,
            daily_amp: parse(s, "synth.daily_amp")?,
            holiday_shift: parse(s, "synth.holiday_shift")?,
            noise_sd: parse(s, "synth.noise_sd")?,
            ar_coef: parse(s, "synth.ar_coef")?,
            hvac_effect: parse(s, "synth.hvac_effect")?,
            quantization: parse(s, "synth.quantization")?,
        };
        let split = SplitSpec {
            data_start: parse_date(s, "split.data_start")?,
            train_end: parse_date(s, "split.train_end")?,
            val_end: parse_date(s, "split.val_end")?,
            data_cutoff: parse_date(s, "split.data_cutoff")?,
            utc_offset_hours: offset,
        };
        let hours = &s["features.working_hours"];
        let working_hours = hours
            .split_once('-')
            .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)))
            .ok_or_else(|| Error::Config(format!("`features.working_hours`: expected H-H, got `{hours}`")))?;
        let engineering = EngineeringConfig {
            mva_window: parse(s, "features.mva_window")?,
            holidays,
            working_hours,
            utc_offset_hours: offset,
            ..EngineeringConfig::default()
        };
        let selection = FeatureSelection::parse(&s["features.groups"])?;
        let hyperparams = Hyperparams {
            max_depth: parse(s, "gbm.max_depth")?,
            n_trees: parse(s, "gbm.n_trees")?,
            gamma: parse(s, "gbm.gamma")?,
            lambda: parse(s, "gbm.lambda")?,
            learning_rate: parse(s, "gbm.learning_rate")?,
        };
        let grid = GridRanges {
            max_depth: parse_list(s, "grid.max_depth")?,
            n_trees: parse_list(s, "grid.n_trees")?,
            gamma: parse_list(s, "grid.gamma")?,
            lambda: parse_list(s, "grid.lambda")?,
            learning_rate: parse_list(s, "grid.learning_rate")?,
        };
        let forecast = ForecastConfig {
            access_interval: TimeDelta::minutes(parse(s, "forecast.access_minutes")?),
            horizon: TimeDelta::minutes(parse(s, "forecast.horizon_minutes")?),
            anchor_hour: parse(s, "forecast.anchor_hour")?,
            utc_offset_hours: offset,
        };
        // Surface parameter problems as configuration errors up front.
        let as_config = |e: Error| Error::Config(e.to_string());
        synth.validate().map_err(as_config)?;
        split.validate().map_err(as_config)?;
        engineering.validate().map_err(as_config)?;
        hyperparams.validate().map_err(as_config)?;
        let (_, horizon_steps) = forecast.to_steps(600).map_err(as_config)?;
        let engineering = EngineeringConfig {
            horizon_steps,
            ..engineering
        };
        Ok(PipelineConfig {
            settings,
            seed,
            source,
            synth,
            split,
            engineering,
            selection,
            hyperparams,
            grid,
            forecast,
        })
    }

    /// Raw data from the configured source.
    pub fn load_data(&self) -> Result<TimeTable> {
        match &self.source {
            DataSource::Synth => synthesize_with_calendar(&self.synth, &self.engineering.holidays),
            DataSource::Csv { path, schema } => {
                let schema = match schema {
                    Some(p) => Schema::parse(&read(p, "schema file")?)?,
                    None => Schema::default(),
                };
                let file = std::fs::File::open(path)
                    .map_err(|e| Error::Config(format!("cannot open {}: {e}", path.display())))?;
                ingest_csv(std::io::BufReader::new(file), &schema)
            }
        }
    }
}
