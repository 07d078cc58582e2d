//! Room-temperature forecasting with gradient-boosted trees, and the tools to
//! explain the resulting model globally, locally and in the frequency domain.

pub mod calendar;
pub mod cli;
pub mod explain;
pub mod columns;
pub mod dataio;
pub mod error;
pub mod features;
pub mod forecast;
pub mod gbm;
pub mod linalg;
pub mod pffra;
pub mod pipeline;
pub mod stats;

pub use error::{Error, ErrorKind, Result};
