//! Train boosted trees with fixed hyperparameters, then grid-search a small
//! range against the validation set and save the winner.
//!
//! cargo run --release --example training

use roomcast::dataio::{synthesize, SplitSpec, SynthConfig};
use roomcast::features::{EngineeringConfig, FeatureSelection};
use roomcast::gbm::{grid_search, train_traced, GridRanges, Hyperparams, Regressor};
use roomcast::pipeline::{Part, Prepared};
use roomcast::stats::metrics;

fn main() -> roomcast::Result<()> {
    let raw = synthesize(&SynthConfig::default())?;
    let prepared = Prepared::new(
        &raw,
        &SplitSpec::default(),
        &EngineeringConfig::default(),
        &FeatureSelection::parse("IOTS-MVA,MVART,Holiday")?,
    )?;
    let train_x = prepared.design(Part::Train)?;
    let val_x = prepared.design(Part::Validation)?;

    let (model, trace) = train_traced(&train_x, &Hyperparams::default())?;
    println!("training MSE after 0, 1, 10, 100 trees: {:.4} {:.4} {:.4} {:.4}", trace[0], trace[1], trace[10], trace[100]);
    let val = metrics(val_x.target(), &model.predict_matrix(&val_x)?)?;
    println!("fixed hyperparameters, validation one-step MAE {:.4}, R² {:.4}", val.mae, val.r2);

    let ranges = GridRanges {
        max_depth: vec![4, 8],
        n_trees: vec![20, 60],
        gamma: vec![0.5],
        lambda: vec![1.0],
        learning_rate: vec![0.1, 0.3],
    };
    let result = grid_search(&train_x, &val_x, &ranges)?;
    for row in &result.table {
        let p = &row.params;
        println!(
            "depth {:>2} trees {:>3} eta {:.1}: validation MAE {:.4}",
            p.max_depth, p.n_trees, p.learning_rate, row.validation.mae
        );
    }
    println!("best: {:?}", result.best);

    let gain = result.best_model.feature_importance_gain();
    let mut ranked: Vec<_> = gain.into_iter().collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1));
    println!("gain importance: {:?}", &ranked[..3]);

    let path = std::env::temp_dir().join("roomcast-example-model.json");
    std::fs::write(&path, result.best_model.to_json()?)?;
    println!("saved model to {}", path.display());
    Ok(())
}
