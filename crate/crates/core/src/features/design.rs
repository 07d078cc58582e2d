use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::columns;
use crate::dataio::TimeTable;
use crate::error::{Error, Result};

/// Smoothed outdoor temperature column.
pub const OUT_TEMP_MVA: &str = "OutTempMVA";
/// Smoothed outdoor humidity column.
pub const OUT_HUMID_MVA: &str = "OutHumidMVA";

/// Feature groups compared in the ablation study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FeatureGroup {
    /// Indoor, outdoor and time-series features, unsmoothed.
    Iots,
    /// The same with outdoor temperature and humidity smoothed.
    IotsMva,
    /// Smoothed historical room temperature.
    Mvart,
    Holiday,
}

impl FeatureGroup {
    pub const ALL: [FeatureGroup; 4] = [
        FeatureGroup::Iots,
        FeatureGroup::IotsMva,
        FeatureGroup::Mvart,
        FeatureGroup::Holiday,
    ];

    pub fn label(self) -> &'static str {
        match self {
            FeatureGroup::Iots => "IOTS",
            FeatureGroup::IotsMva => "IOTS-MVA",
            FeatureGroup::Mvart => "MVART",
            FeatureGroup::Holiday => "Holiday",
        }
    }

    fn columns(self) -> &'static [&'static str] {
        const SHARED: [&str; 7] = [
            columns::ON_OFF,
            columns::OP_MODE,
            columns::QUARTER,
            columns::MONTH,
            columns::WEEKDAY,
            columns::HOUR,
            columns::OCCUPANCY,
        ];
        const IOTS: [&str; 9] = [
            SHARED[0],
            SHARED[1],
            SHARED[2],
            SHARED[3],
            SHARED[4],
            SHARED[5],
            SHARED[6],
            columns::OUT_HUMID,
            columns::OUT_TEMP,
        ];
        const IOTS_MVA: [&str; 9] = [
            SHARED[0],
            SHARED[1],
            SHARED[2],
            SHARED[3],
            SHARED[4],
            SHARED[5],
            SHARED[6],
            OUT_HUMID_MVA,
            OUT_TEMP_MVA,
        ];
        match self {
            FeatureGroup::Iots => &IOTS,
            FeatureGroup::IotsMva => &IOTS_MVA,
            FeatureGroup::Mvart => &[columns::MVART],
            FeatureGroup::Holiday => &[columns::HOLIDAY],
        }
    }
}

impl fmt::Display for FeatureGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for FeatureGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FeatureGroup::ALL
            .into_iter()
            .find(|g| g.label().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::UnknownFeature(s.trim().to_string()))
    }
}

/// Canonical column order of a design matrix.
const CANONICAL_ORDER: [&str; 13] = [
    columns::ON_OFF,
    columns::OP_MODE,
    columns::QUARTER,
    columns::MONTH,
    columns::WEEKDAY,
    columns::HOUR,
    columns::OCCUPANCY,
    columns::HOLIDAY,
    columns::OUT_HUMID,
    OUT_HUMID_MVA,
    columns::OUT_TEMP,
    OUT_TEMP_MVA,
    columns::MVART,
];

/// A feature selection: group labels and/or individual column names.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSelection {
    items: Vec<String>,
}

impl FeatureSelection {
    pub fn groups(groups: &[FeatureGroup]) -> Self {
        FeatureSelection {
            items: groups.iter().map(|g| g.label().to_string()).collect(),
        }
    }

    /// Parses a comma-separated list such as `IOTS-MVA,MVART,Holiday`.
    pub fn parse(spec: &str) -> Result<Self> {
        let items: Vec<String> = spec
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::to_string)
            .collect();
        let sel = FeatureSelection { items };
        sel.resolve()?;
        Ok(sel)
    }

    pub fn items(&self) -> &[String] {
        &self.items
    }

    /// Resolves to an ordered, duplicate-free list of column names.
    pub fn resolve(&self) -> Result<Vec<String>> {
        if self.items.is_empty() {
            return Err(Error::UnknownFeature("(empty selection)".into()));
        }
        let mut wanted: Vec<&str> = Vec::new();
        for item in &self.items {
            if let Ok(group) = item.parse::<FeatureGroup>() {
                wanted.extend_from_slice(group.columns());
            } else if let Some(name) = CANONICAL_ORDER.iter().find(|c| **c == item.as_str()) {
                wanted.push(name);
            } else if columns::EXCLUDED.contains(&item.as_str()) {
                return Err(Error::UnknownFeature(format!(
                    "{item} (excluded from every feature set)"
                )));
            } else {
                return Err(Error::UnknownFeature(item.clone()));
            }
        }
        let has = |c: &str| wanted.contains(&c);
        if (has(columns::OUT_TEMP) && has(OUT_TEMP_MVA))
            || (has(columns::OUT_HUMID) && has(OUT_HUMID_MVA))
        {
            return Err(Error::Config(
                "IOTS and IOTS-MVA select raw and smoothed versions of the same signals; pick one"
                    .into(),
            ));
        }
        Ok(CANONICAL_ORDER
            .iter()
            .filter(|c| has(c))
            .map(|c| c.to_string())
            .collect())
    }

    pub fn uses_mvart(&self) -> bool {
        self.resolve()
            .map(|cols| cols.iter().any(|c| c == columns::MVART))
            .unwrap_or(false)
    }
}

impl fmt::Display for FeatureSelection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.items.join("+"))
    }
}

/// Training means of each feature, used for mean substitution and as the
/// Shapley/PDP background.
pub type FeatureMeans = BTreeMap<String, f64>;

/// Row-major design matrix with its aligned target and timestamps.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    feature_names: Vec<String>,
    data: Vec<f64>,
    target: Vec<f64>,
    timestamps: Vec<DateTime<Utc>>,
}

impl FeatureMatrix {
    pub fn new(
        feature_names: Vec<String>,
        data: Vec<f64>,
        target: Vec<f64>,
        timestamps: Vec<DateTime<Utc>>,
    ) -> Result<Self> {
        let width = feature_names.len();
        if width == 0 {
            return Err(Error::Input("design matrix needs at least one feature".into()));
        }
        for (i, name) in feature_names.iter().enumerate() {
            if feature_names[..i].contains(name) {
                return Err(Error::Input(format!("duplicate feature name `{name}`")));
            }
        }
        if data.len() != width * target.len() || timestamps.len() != target.len() {
            return Err(Error::Input(format!(
                "inconsistent matrix shape: {} values, {width} features, {} targets, {} timestamps",
                data.len(),
                target.len(),
                timestamps.len()
            )));
        }
        Ok(FeatureMatrix {
            feature_names,
            data,
            target,
            timestamps,
        })
    }

    /// Matrix without timestamps (synthetic row indices are used instead).
    pub fn from_rows(feature_names: Vec<String>, rows: &[Vec<f64>], target: Vec<f64>) -> Result<Self> {
        let data = rows.iter().flatten().copied().collect();
        let t0 = DateTime::<Utc>::UNIX_EPOCH;
        let timestamps = (0..target.len())
            .map(|i| t0 + chrono::Duration::minutes(10 * i as i64))
            .collect();
        FeatureMatrix::new(feature_names, data, target, timestamps)
    }

    pub fn n_rows(&self) -> usize {
        self.target.len()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn feature_index(&self, name: &str) -> Result<usize> {
        self.feature_names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownFeature(name.to_string()))
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let w = self.n_features();
        &self.data[i * w..(i + 1) * w]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> + Clone {
        self.data.chunks_exact(self.n_features())
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n_features() + j]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows().map(|r| r[j]).collect()
    }

    pub fn target(&self) -> &[f64] {
        &self.target
    }

    pub fn timestamps(&self) -> &[DateTime<Utc>] {
        &self.timestamps
    }

    pub fn set_value(&mut self, i: usize, j: usize, v: f64) {
        let w = self.n_features();
        self.data[i * w + j] = v;
    }

    /// Column means over all rows.
    pub fn means(&self) -> FeatureMeans {
        let n = self.n_rows().max(1) as f64;
        self.feature_names
            .iter()
            .enumerate()
            .map(|(j, name)| (name.clone(), self.rows().map(|r| r[j]).sum::<f64>() / n))
            .collect()
    }

    /// Contiguous row range.
    pub fn slice_rows(&self, range: std::ops::Range<usize>) -> FeatureMatrix {
        let w = self.n_features();
        FeatureMatrix {
            feature_names: self.feature_names.clone(),
            data: self.data[range.start * w..range.end * w].to_vec(),
            target: self.target[range.clone()].to_vec(),
            timestamps: self.timestamps[range].to_vec(),
        }
    }
}

/// Extracts `names` from an engineered table for rows `from..`, without any
/// NaN filtering.
pub(crate) fn matrix_from_table(
    table: &TimeTable,
    names: &[String],
    from: usize,
) -> Result<FeatureMatrix> {
    let cols = names
        .iter()
        .map(|n| {
            table
                .column(n)
                .ok_or_else(|| Error::Pipeline(format!("column `{n}` was not engineered")))
        })
        .collect::<Result<Vec<_>>>()?;
    let from = from.min(table.len());
    let mut data = Vec::with_capacity((table.len() - from) * names.len());
    for i in from..table.len() {
        data.extend(cols.iter().map(|c| c[i]));
    }
    FeatureMatrix::new(
        names.to_vec(),
        data,
        table.target()[from..].to_vec(),
        table.timestamps()[from..].to_vec(),
    )
}
