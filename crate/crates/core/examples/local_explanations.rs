//! Explain individual forecasts: find an accurate and a badly deviated
//! prediction of the same true temperature, then attribute both with exact
//! Shapley values and LIME.
//!
//! cargo run --release --example local_explanations

use roomcast::dataio::{synthesize, SplitSpec, SynthConfig};
use roomcast::explain::{lime_explain, select_case_pair, shap_exact, LimeConfig};
use roomcast::features::{EngineeringConfig, FeatureSelection};
use roomcast::forecast::{rolling_forecast, ForecastConfig};
use roomcast::gbm::{train, Hyperparams};
use roomcast::pipeline::{Part, Prepared};

fn main() -> roomcast::Result<()> {
    let raw = synthesize(&SynthConfig::default())?;
    let config = EngineeringConfig::default();
    let prepared = Prepared::new(&raw, &SplitSpec::default(), &config, &FeatureSelection::parse("IOTS-MVA,MVART,Holiday")?)?;
    let train_x = prepared.design(Part::Train)?;
    let model = train(&train_x, &Hyperparams::default())?;
    let means = train_x.means();

    let run = rolling_forecast(
        &model,
        &prepared.context(Part::Test)?,
        &prepared.names,
        config.mva_window,
        &ForecastConfig::default(),
    )?;
    let Some(pair) = select_case_pair(&run.y_true, &run.y_pred, 0.01, 2.0) else {
        println!("no accurate/deviated pair in this forecast");
        return Ok(());
    };

    for (label, i) in [("accurate", pair.accurate), ("deviated", pair.deviated)] {
        println!(
            "\n{label}: {} true {:.2} predicted {:.2}",
            run.timestamps[i], run.y_true[i], run.y_pred[i]
        );
        let instance = &run.inputs[i];
        let shap = shap_exact(&model, &prepared.names, instance, &means)?;
        let lime = lime_explain(&model, instance, &train_x, &LimeConfig::default())?;
        println!("  base value {:.3}, local LIME R² {:.3}", shap.base_value, lime.local_r2);
        println!("  {:<12} {:>9} {:>9} {:>9}", "feature", "value", "shapley", "lime");
        for (j, name) in prepared.names.iter().enumerate() {
            println!(
                "  {name:<12} {:>9.3} {:>9.4} {:>9.4}",
                instance[j], shap.contributions[j], lime.attribution.contributions[j]
            );
        }
    }
    Ok(())
}
