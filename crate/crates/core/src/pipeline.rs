//! Shared end-to-end plumbing: engineer the full table once, split it, and
//! build per-split design matrices with the history each split needs.

use serde::{Deserialize, Serialize};

use crate::dataio::{split, SplitSpec, Splits, TimeTable};
use crate::error::Result;
use crate::features::{
    build_design_matrix, engineer, warmup_rows, EngineeringConfig, FeatureMatrix, FeatureSelection,
};
use crate::forecast::with_history;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Part {
    Train,
    Validation,
    Test,
}

impl Part {
    pub const ALL: [Part; 3] = [Part::Train, Part::Validation, Part::Test];

    pub fn label(self) -> &'static str {
        match self {
            Part::Train => "train",
            Part::Validation => "validation",
            Part::Test => "test",
        }
    }
}

/// An engineered dataset split into partitions.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub config: EngineeringConfig,
    pub selection: FeatureSelection,
    pub names: Vec<String>,
    pub engineered: TimeTable,
    pub splits: Splits,
}

impl Prepared {
    pub fn new(
        raw: &TimeTable,
        spec: &SplitSpec,
        config: &EngineeringConfig,
        selection: &FeatureSelection,
    ) -> Result<Prepared> {
        let names = selection.resolve()?;
        let engineered = engineer(raw, config)?;
        let splits = split(&engineered, spec)?;
        Ok(Prepared {
            config: config.clone(),
            selection: selection.clone(),
            names,
            engineered,
            splits,
        })
    }

    pub fn part(&self, part: Part) -> &TimeTable {
        match part {
            Part::Train => &self.splits.train,
            Part::Validation => &self.splits.validation,
            Part::Test => &self.splits.test,
        }
    }

    /// The partition preceded by `mva_window` rows of earlier data when
    /// available. Design matrices and forecasts are built from this view.
    pub fn context(&self, part: Part) -> Result<TimeTable> {
        with_history(&self.engineered, self.part(part), warmup_rows(&self.config))
    }

    /// Design matrix covering the partition's rows that have full history.
    pub fn design(&self, part: Part) -> Result<FeatureMatrix> {
        build_design_matrix(&self.context(part)?, &self.config, &self.selection)
    }
}
