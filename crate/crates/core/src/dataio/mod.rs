//! Ingestion, alignment, synthesis and splitting of timestamped sensor data.

mod align;
mod csv_io;
mod split;
mod synth;
mod table;

pub use align::align_state_change;
pub use csv_io::{ingest_csv, parse_timestamp, write_csv, Role, Schema};
pub use split::{split, SplitSpec, Splits};
pub use synth::{quantize, synthesize, synthesize_with_calendar, SynthConfig};
pub use table::{TimeTable, DEFAULT_INTERVAL_SECS, TARGET_COLUMN};
