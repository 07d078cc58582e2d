//! Synthesize a dataset, write it as CSV, read it back through a column
//! schema, engineer features and split it into partitions.
//!
//! cargo run --example data_pipeline

use roomcast::dataio::{ingest_csv, split, synthesize, write_csv, Schema, SplitSpec, SynthConfig};
use roomcast::features::{build_design_matrix, engineer, EngineeringConfig, FeatureSelection};

fn main() -> roomcast::Result<()> {
    let table = synthesize(&SynthConfig::default())?;
    println!("synthesized {} rows, columns: {:?}", table.len(), table.column_names().collect::<Vec<_>>());

    // Round trip through CSV, renaming the target on the way in.
    let mut csv = Vec::new();
    write_csv(&table, &mut csv)?;
    let text = String::from_utf8(csv).expect("utf-8").replacen(",RT\n", ",room_temp\n", 1);
    let schema = Schema::parse("timestamp=timestamp\nroom_temp=target\nSetpointTemperature=ignore\n")?;
    let ingested = ingest_csv(text.as_bytes(), &schema)?;
    println!("ingested {} rows with {} feature columns", ingested.len(), ingested.columns().len());

    let config = EngineeringConfig::default();
    let engineered = engineer(&ingested, &config)?;
    let parts = split(&engineered, &SplitSpec::default())?;
    for (name, part) in [("train", &parts.train), ("validation", &parts.validation), ("test", &parts.test)] {
        println!(
            "{name:>10}: {:>6} rows  {} .. {}",
            part.len(),
            part.timestamps()[0],
            part.timestamps()[part.len() - 1]
        );
    }

    let selection = FeatureSelection::parse("IOTS-MVA,MVART,Holiday")?;
    let x = build_design_matrix(&parts.train, &config, &selection)?;
    println!("training design matrix: {} rows x {:?}", x.n_rows(), x.feature_names());
    Ok(())
}
