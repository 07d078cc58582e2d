//! Model-wide explanations: gain and permutation importance, partial
//! dependence, and linear and tree surrogates.
//!
//! cargo run --release --example global_explanations

use roomcast::dataio::{synthesize, SplitSpec, SynthConfig};
use roomcast::explain::{
    fit_surrogate_ridge, fit_surrogate_tree, pdp, permutation_importance, ImportanceMetric,
    ImportanceStrategy,
};
use roomcast::features::{EngineeringConfig, FeatureSelection};
use roomcast::gbm::{train, Hyperparams};
use roomcast::pipeline::{Part, Prepared};

fn main() -> roomcast::Result<()> {
    let raw = synthesize(&SynthConfig::default())?;
    let prepared = Prepared::new(
        &raw,
        &SplitSpec::default(),
        &EngineeringConfig::default(),
        &FeatureSelection::parse("IOTS-MVA,MVART,Holiday")?,
    )?;
    let train_x = prepared.design(Part::Train)?;
    let model = train(&train_x, &Hyperparams::default())?;
    let val_x = prepared.design(Part::Validation)?;
    let means = train_x.means();

    let gain = model.feature_importance_gain();
    let perm = permutation_importance(&model, &val_x, &means, ImportanceMetric::Mae, ImportanceStrategy::MeanSubstitute)?;
    let shuffled = permutation_importance(&model, &val_x, &means, ImportanceMetric::Mae, ImportanceStrategy::Shuffle { seed: 1 })?;
    println!("{:<12} {:>8} {:>10} {:>10}", "feature", "gain", "mean-sub", "shuffle");
    for name in &prepared.names {
        println!("{name:<12} {:>8.4} {:>10.4} {:>10.4}", gain[name], perm[name], shuffled[name]);
    }

    for feature in ["MVART", "Hour"] {
        let curve = pdp(&model, &val_x, feature, 10)?;
        let points: Vec<String> = curve
            .grid
            .iter()
            .zip(&curve.mean_response)
            .map(|(g, r)| format!("{g:.1}:{r:.2}"))
            .collect();
        println!("PDP {feature} (categorical: {}): {}", curve.categorical, points.join(" "));
    }

    let ridge = fit_surrogate_ridge(&model, &val_x, 1.0)?;
    println!("ridge surrogate R² {:.4}, MVART slope {:.4}", ridge.fidelity_r2, ridge.coefficient("MVART").unwrap_or(0.0));
    let tree = fit_surrogate_tree(&model, &val_x, 3)?;
    println!("depth-3 tree surrogate R² {:.4}, importance {:?}", tree.fidelity_r2, tree.importance);
    Ok(())
}
