use std::collections::BTreeMap;
use std::path::Path;

use chrono::{DateTime, TimeDelta, Utc};
use serde::Serialize;

use super::config::{DataSource, PipelineConfig};
use super::output::{sha256_hex, versioned, Output};
use super::{CaseKind, Cli, Command, DiagnoseArgs, Diagnostic, ExplainArgs, Method, PffraMode, SplitArg};
use crate::columns;
use crate::dataio::{split, synthesize_with_calendar, write_csv, TimeTable};
use crate::error::{Error, Result};
use crate::explain::{
    fit_surrogate_ridge, fit_surrogate_tree, lime_explain, pdp, permutation_importance,
    select_case_pair, shap_exact, Attribution, ImportanceMetric, ImportanceStrategy, LimeConfig,
};
use crate::features::FeatureSelection;
use crate::forecast::{
    horizon_sweep, rolling_forecast, window_sweep, write_sweep_csv, ForecastRun, Tuning,
};
use crate::gbm::{grid_search, train_traced, Ensemble, Hyperparams, Regressor};
use crate::pffra::{pffra, pffra_rolling, PffraOptions, PffraReport, Window};
use crate::pipeline::{Part, Prepared};
use crate::stats::{acf, adf_test, histogram, metrics, pacf, qq_normal, MetricReport};

/// Feature sets compared by `ablate` unless `--groups` says otherwise.
const DEFAULT_ABLATION: [&str; 5] = [
    "IOTS",
    "IOTS-MVA",
    "IOTS,MVART",
    "IOTS-MVA,MVART",
    "IOTS-MVA,MVART,Holiday",
];
const SWEEP_WIDTHS_MIN: [i64; 6] = [0, 10, 60, 180, 480, 1440];
const SWEEP_INTERVALS_MIN: [i64; 4] = [10, 60, 480, 1440];

struct Run<'a> {
    cli: &'a Cli,
    cfg: PipelineConfig,
    out: Output,
    options: BTreeMap<String, String>,
    inputs: BTreeMap<String, String>,
}

impl Run<'_> {
    fn note(&self, msg: impl AsRef<str>) {
        if !self.cli.quiet {
            eprintln!("{}", msg.as_ref());
        }
    }

    fn option(&mut self, key: &str, value: impl ToString) {
        self.options.insert(key.to_string(), value.to_string());
    }

    fn prepared(&self) -> Result<Prepared> {
        let raw = self.cfg.load_data()?;
        Prepared::new(&raw, &self.cfg.split, &self.cfg.engineering, &self.cfg.selection)
    }

    /// Loads a model file, records its digest and checks it was trained on
    /// the configured feature set.
    fn model(&mut self, path: &Path, prepared: &Prepared) -> Result<Ensemble> {
        let bytes = std::fs::read(path)
            .map_err(|e| Error::Config(format!("cannot read model {}: {e}", path.display())))?;
        self.inputs.insert("model".into(), sha256_hex(&bytes));
        let text = String::from_utf8(bytes)
            .map_err(|_| Error::Config(format!("model {} is not UTF-8", path.display())))?;
        let model = Ensemble::from_json(&text)
            .map_err(|e| Error::Config(format!("cannot load model {}: {e}", path.display())))?;
        if model.feature_names != prepared.names {
            return Err(Error::Config(format!(
                "model features [{}] differ from the configured selection [{}]",
                model.feature_names.join(", "),
                prepared.names.join(", ")
            )));
        }
        Ok(model)
    }

    fn rolling(&self, model: &Ensemble, prepared: &Prepared, part: Part) -> Result<ForecastRun> {
        rolling_forecast(
            model,
            &prepared.context(part)?,
            &prepared.names,
            self.cfg.engineering.mva_window,
            &self.cfg.forecast,
        )
        .map_err(|e| e.context(format!("the {} rolling forecast", part.label())))
    }
}

pub(super) fn execute(cli: &Cli, mut settings: BTreeMap<String, String>) -> Result<()> {
    // Subcommand flags that stand for configuration keys.
    match &cli.command {
        Command::Synth { days: Some(d) } => {
            settings.insert("synth.days".into(), d.to_string());
        }
        Command::Ingest { csv, schema } => {
            if let Some(p) = csv {
                settings.insert("data.source".into(), "csv".into());
                settings.insert("data.csv".into(), p.display().to_string());
            }
            if let Some(p) = schema {
                settings.insert("data.schema".into(), p.display().to_string());
            }
        }
        _ => {}
    }
    let cfg = PipelineConfig::from_settings(settings)?;
    let out = Output::new(&cli.out, cli.force)?;
    let mut run = Run {
        cli,
        cfg,
        out,
        options: BTreeMap::new(),
        inputs: BTreeMap::new(),
    };
    if let DataSource::Csv { path, schema } = &run.cfg.source {
        let path = path.clone();
        let schema = schema.clone();
        let digest = std::fs::read(&path).map(|b| sha256_hex(&b));
        if let Ok(d) = digest {
            run.inputs.insert("data".into(), d);
        }
        if let Some(d) = schema.and_then(|p| std::fs::read(p).ok()) {
            run.inputs.insert("schema".into(), sha256_hex(&d));
        }
    }

    let name = match &cli.command {
        Command::Synth { .. } => {
            synth(&mut run)?;
            "synth"
        }
        Command::Ingest { .. } => {
            ingest(&mut run)?;
            "ingest"
        }
        Command::Split => {
            split_cmd(&mut run)?;
            "split"
        }
        Command::Train { grid } => {
            train_cmd(&mut run, *grid)?;
            "train"
        }
        Command::Evaluate { model, bin_width } => {
            evaluate(&mut run, model, *bin_width)?;
            "evaluate"
        }
        Command::Ablate {
            groups,
            grid,
            skip_sweeps,
        } => {
            ablate(&mut run, groups.as_deref(), *grid, *skip_sweeps)?;
            "ablate"
        }
        Command::Explain(args) => {
            explain(&mut run, args)?;
            "explain"
        }
        Command::Diagnose(args) => {
            diagnose(&mut run, args)?;
            "diagnose"
        }
    };
    let Run {
        cfg,
        out,
        options,
        inputs,
        ..
    } = run;
    let dir = out.dir().to_path_buf();
    let artifacts = out.finish(name, cfg.seed, &cfg.settings, &options, &inputs)?;
    if !cli.quiet {
        eprintln!("{name}: wrote {} artifacts to {}", artifacts.len(), dir.display());
    }
    Ok(())
}

fn table_csv(table: &TimeTable) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write_csv(table, &mut buf)?;
    Ok(buf)
}

fn stamp(ts: DateTime<Utc>) -> String {
    ts.format("%Y-%m-%dT%H:%M:%SZ").to_string()
}

#[derive(Serialize)]
struct Span {
    rows: usize,
    start: Option<String>,
    end: Option<String>,
}

fn span(t: &TimeTable) -> Span {
    Span {
        rows: t.len(),
        start: t.timestamps().first().copied().map(stamp),
        end: t.timestamps().last().copied().map(stamp),
    }
}

fn synth(run: &mut Run) -> Result<()> {
    let table = synthesize_with_calendar(&run.cfg.synth, &run.cfg.engineering.holidays)?;
    run.note(format!("synthesized {} rows", table.len()));
    run.out.add("synth.csv", table_csv(&table)?)
}

fn ingest(run: &mut Run) -> Result<()> {
    if !matches!(run.cfg.source, DataSource::Csv { .. }) {
        return Err(Error::Config(
            "ingest needs --csv PATH or data.source = csv in the configuration".into(),
        ));
    }
    let table = run.cfg.load_data()?;
    let target = table.target();
    let mean = target.iter().sum::<f64>() / target.len() as f64;
    let min = target.iter().copied().fold(f64::INFINITY, f64::min);
    let max = target.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    #[derive(Serialize)]
    struct Summary {
        span: Span,
        interval_secs: i64,
        columns: Vec<String>,
        target_mean: f64,
        target_min: f64,
        target_max: f64,
    }
    let summary = Summary {
        span: span(&table),
        interval_secs: table.interval_secs(),
        columns: table.column_names().map(str::to_string).collect(),
        target_mean: mean,
        target_min: min,
        target_max: max,
    };
    run.note(format!("ingested {} rows", table.len()));
    run.out.add("data.csv", table_csv(&table)?)?;
    run.out.add_json("ingest.json", &versioned(summary))
}

fn split_cmd(run: &mut Run) -> Result<()> {
    let table = run.cfg.load_data()?;
    let parts = split(&table, &run.cfg.split)?;
    let mut spans = BTreeMap::new();
    for (label, t) in [
        ("train", &parts.train),
        ("validation", &parts.validation),
        ("test", &parts.test),
    ] {
        run.out.add(&format!("{label}.csv"), table_csv(t)?)?;
        spans.insert(label, span(t));
    }
    #[derive(Serialize)]
    struct SplitReport<'a> {
        parts: BTreeMap<&'a str, Span>,
    }
    run.out.add_json("split.json", &versioned(SplitReport { parts: spans }))
}

#[derive(Serialize)]
struct PartScores {
    one_step: MetricReport,
    rolling: MetricReport,
}

fn part_scores(run: &Run, model: &Ensemble, prepared: &Prepared, part: Part) -> Result<(PartScores, ForecastRun)> {
    let x = prepared.design(part)?;
    let one_step = metrics(x.target(), &model.predict_matrix(&x)?)?;
    let forecast = run.rolling(model, prepared, part)?;
    let rolling = forecast.metrics()?;
    Ok((PartScores { one_step, rolling }, forecast))
}

fn train_cmd(run: &mut Run, grid: bool) -> Result<()> {
    let prepared = run.prepared()?;
    let train_x = prepared.design(Part::Train)?;
    run.option("grid", grid);
    let (model, tuning) = if grid {
        let val_x = prepared.design(Part::Validation)?;
        let n = run.cfg.grid.combinations().len();
        run.note(format!("grid search over {n} combinations"));
        let result = grid_search(&train_x, &val_x, &run.cfg.grid)?;
        run.out.add_with("grid_scores.csv", |buf| {
            let mut w = csv::Writer::from_writer(buf);
            w.write_record([
                "max_depth", "n_trees", "gamma", "lambda", "learning_rate", "mse", "mae", "mape", "r2",
            ])?;
            for r in &result.table {
                let p = &r.params;
                let m = &r.validation;
                w.write_record([
                    p.max_depth.to_string(),
                    p.n_trees.to_string(),
                    p.gamma.to_string(),
                    p.lambda.to_string(),
                    p.learning_rate.to_string(),
                    m.mse.to_string(),
                    m.mae.to_string(),
                    m.mape.map(|v| v.to_string()).unwrap_or_default(),
                    m.r2.to_string(),
                ])?;
            }
            w.flush()?;
            Ok(())
        })?;
        (result.best_model, "grid")
    } else {
        let (model, trace) = train_traced(&train_x, &run.cfg.hyperparams)?;
        run.out.add_with("training_trace.csv", |buf| {
            let mut w = csv::Writer::from_writer(buf);
            w.write_record(["trees", "train_mse"])?;
            for (k, mse) in trace.iter().enumerate() {
                w.write_record([k.to_string(), mse.to_string()])?;
            }
            w.flush()?;
            Ok(())
        })?;
        (model, "fixed")
    };
    let mut scores = BTreeMap::new();
    for part in Part::ALL {
        scores.insert(part.label(), part_scores(run, &model, &prepared, part)?.0);
    }
    run.note(format!(
        "validation rolling MAE {:.4}",
        scores["validation"].rolling.mae
    ));
    #[derive(Serialize)]
    struct TrainReport<'a> {
        tuning: &'a str,
        features: &'a [String],
        hyperparams: Hyperparams,
        metrics: BTreeMap<&'a str, PartScores>,
        gain_importance: BTreeMap<String, f64>,
    }
    let report = TrainReport {
        tuning,
        features: &prepared.names,
        hyperparams: Hyperparams {
            max_depth: model.max_depth,
            n_trees: model.trees.len(),
            gamma: model.gamma,
            lambda: model.lambda,
            learning_rate: model.learning_rate,
        },
        metrics: scores,
        gain_importance: model.feature_importance_gain(),
    };
    run.out.add_json("metrics.json", &versioned(report))?;
    let mut text = model.to_json()?.into_bytes();
    text.push(b'\n');
    run.out.add("model.json", text)
}

fn evaluate(run: &mut Run, model_path: &Path, bin_width: f64) -> Result<()> {
    if !(bin_width > 0.0) {
        return Err(Error::Config(format!("--bin-width must be positive, got {bin_width}")));
    }
    let prepared = run.prepared()?;
    let model = run.model(model_path, &prepared)?;
    run.option("bin_width", bin_width);
    let mut scores = BTreeMap::new();
    for part in Part::ALL {
        let label = part.label();
        let (s, forecast) = part_scores(run, &model, &prepared, part)?;
        run.note(format!(
            "{label}: one-step MAE {:.4}, rolling MAE {:.4}",
            s.one_step.mae, s.rolling.mae
        ));
        scores.insert(label, s);
        let residuals = forecast.residuals();
        run.out.add_with(&format!("forecast_{label}.csv"), |buf| forecast.write_csv(buf))?;
        run.out.add_with(&format!("residuals_{label}.csv"), |buf| {
            let mut w = csv::Writer::from_writer(buf);
            w.write_record(["timestamp", "residual"])?;
            for (ts, r) in forecast.timestamps.iter().zip(&residuals) {
                w.write_record([stamp(*ts), r.to_string()])?;
            }
            w.flush()?;
            Ok(())
        })?;
        let hist = histogram(&residuals, bin_width)?;
        run.out.add_with(&format!("residual_hist_{label}.csv"), |buf| {
            write_pairs(buf, ["bin_start", "count"], hist.iter().map(|(b, c)| (b.to_string(), c.to_string())))
        })?;
        let qq = qq_normal(&residuals)?;
        run.out.add_with(&format!("residual_qq_{label}.csv"), |buf| {
            write_pairs(buf, ["theoretical", "sample"], qq.iter().map(|(t, s)| (t.to_string(), s.to_string())))
        })?;
    }
    #[derive(Serialize)]
    struct EvalReport<'a> {
        access_minutes: i64,
        horizon_minutes: i64,
        metrics: BTreeMap<&'a str, PartScores>,
    }
    let report = EvalReport {
        access_minutes: run.cfg.forecast.access_interval.num_minutes(),
        horizon_minutes: run.cfg.forecast.horizon.num_minutes(),
        metrics: scores,
    };
    run.out.add_json("metrics.json", &versioned(report))
}

fn write_pairs(
    buf: &mut Vec<u8>,
    header: [&str; 2],
    rows: impl Iterator<Item = (String, String)>,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(buf);
    w.write_record(header)?;
    for (a, b) in rows {
        w.write_record([a, b])?;
    }
    w.flush()?;
    Ok(())
}

fn ablate(run: &mut Run, groups: Option<&str>, grid: bool, skip_sweeps: bool) -> Result<()> {
    let sets: Vec<FeatureSelection> = match groups {
        Some(text) => text
            .split(';')
            .filter(|s| !s.trim().is_empty())
            .map(FeatureSelection::parse)
            .collect::<Result<_>>()?,
        None => DEFAULT_ABLATION
            .iter()
            .map(|s| FeatureSelection::parse(s))
            .collect::<Result<_>>()?,
    };
    if sets.is_empty() {
        return Err(Error::Config("--groups names no feature set".into()));
    }
    run.option("groups", sets.iter().map(ToString::to_string).collect::<Vec<_>>().join(";"));
    run.option("grid", grid);
    run.option("skip_sweeps", skip_sweeps);
    let tuning = if grid {
        Tuning::Grid(run.cfg.grid.clone())
    } else {
        Tuning::Fixed(run.cfg.hyperparams)
    };
    let raw = run.cfg.load_data()?;
    let mut rows = Vec::new();
    for sel in &sets {
        let prepared = Prepared::new(&raw, &run.cfg.split, &run.cfg.engineering, sel)?;
        let model = tuning.fit(&prepared)?;
        let m = run.rolling(&model, &prepared, Part::Validation)?.metrics()?;
        run.note(format!("{sel}: validation MAE {:.4}", m.mae));
        rows.push((sel.to_string(), m));
    }
    run.out.add_with("ablation.csv", |buf| {
        let mut w = csv::Writer::from_writer(buf);
        w.write_record(["group", "mse", "mae", "mape", "r2"])?;
        for (g, m) in &rows {
            w.write_record([
                g.clone(),
                m.mse.to_string(),
                m.mae.to_string(),
                m.mape.map(|v| v.to_string()).unwrap_or_default(),
                m.r2.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    })?;
    if skip_sweeps {
        return Ok(());
    }

    let widths: Vec<TimeDelta> = SWEEP_WIDTHS_MIN.iter().map(|&m| TimeDelta::minutes(m)).collect();
    run.note("sweeping the MVA window");
    let wrows = window_sweep(&raw, &run.cfg.split, &run.cfg.engineering, &widths, &tuning, &run.cfg.forecast)?;
    run.out.add_with("window_sweep.csv", |buf| write_sweep_csv(&wrows, buf))?;

    run.note("sweeping the forecast horizon");
    let prepared = Prepared::new(&raw, &run.cfg.split, &run.cfg.engineering, &run.cfg.selection)?;
    let model = tuning.fit(&prepared)?;
    let intervals: Vec<TimeDelta> = SWEEP_INTERVALS_MIN.iter().map(|&m| TimeDelta::minutes(m)).collect();
    let hrows = horizon_sweep(
        &model,
        &prepared.context(Part::Validation)?,
        &prepared.names,
        run.cfg.engineering.mva_window,
        &intervals,
        &run.cfg.forecast,
    )?;
    run.out.add_with("horizon_sweep.csv", |buf| write_sweep_csv(&hrows, buf))
}

fn part_of(s: SplitArg) -> Part {
    match s {
        SplitArg::Train => Part::Train,
        SplitArg::Validation => Part::Validation,
        SplitArg::Test => Part::Test,
    }
}

fn explain(run: &mut Run, args: &ExplainArgs) -> Result<()> {
    let prepared = run.prepared()?;
    let model = run.model(&args.model, &prepared)?;
    let train_x = prepared.design(Part::Train)?;
    let means = train_x.means();
    let part = part_of(args.split.unwrap_or(SplitArg::Validation));
    let method = format!("{:?}", args.method).to_lowercase();
    run.option("method", &method);

    match args.method {
        Method::Importance => {
            run.option("split", part.label());
            let x = prepared.design(part)?;
            let gain = model.feature_importance_gain();
            let mean_sub = permutation_importance(&model, &x, &means, ImportanceMetric::Mae, ImportanceStrategy::MeanSubstitute)?;
            let shuffled = permutation_importance(
                &model,
                &x,
                &means,
                ImportanceMetric::Mae,
                ImportanceStrategy::Shuffle { seed: run.cfg.seed },
            )?;
            run.out.add_with("importance.csv", |buf| {
                let mut w = csv::Writer::from_writer(buf);
                w.write_record(["feature", "gain", "permutation_mean", "permutation_shuffle"])?;
                for name in &prepared.names {
                    w.write_record([
                        name.clone(),
                        gain.get(name).copied().unwrap_or(0.0).to_string(),
                        mean_sub[name].to_string(),
                        shuffled[name].to_string(),
                    ])?;
                }
                w.flush()?;
                Ok(())
            })?;
            #[derive(Serialize)]
            struct ImportanceReport<'a> {
                split: &'a str,
                metric: &'a str,
                gain: BTreeMap<String, f64>,
                permutation_mean: BTreeMap<String, f64>,
                permutation_shuffle: BTreeMap<String, f64>,
            }
            run.out.add_json(
                "importance.json",
                &versioned(ImportanceReport {
                    split: part.label(),
                    metric: "mae",
                    gain,
                    permutation_mean: mean_sub,
                    permutation_shuffle: shuffled,
                }),
            )
        }
        Method::Pdp => {
            run.option("split", part.label());
            run.option("grid_size", args.grid_size);
            let x = prepared.design(part)?;
            let features = match &args.feature {
                Some(f) => vec![f.clone()],
                None => prepared.names.clone(),
            };
            for f in &features {
                let curve = pdp(&model, &x, f, args.grid_size)?;
                run.out.add_with(&format!("pdp_{f}.csv"), |buf| {
                    write_pairs(
                        buf,
                        ["value", "mean_response"],
                        curve.grid.iter().zip(&curve.mean_response).map(|(g, r)| (g.to_string(), r.to_string())),
                    )
                })?;
                run.out.add_json(&format!("pdp_{f}.json"), &curve)?;
            }
            Ok(())
        }
        Method::Surrogate => {
            run.option("split", part.label());
            run.option("depth", args.depth);
            run.option("lambda", args.lambda);
            let x = prepared.design(part)?;
            let ridge = fit_surrogate_ridge(&model, &x, args.lambda)?;
            let tree = fit_surrogate_tree(&model, &x, args.depth)?;
            run.note(format!(
                "surrogate fidelity R²: ridge {:.4}, tree {:.4}",
                ridge.fidelity_r2, tree.fidelity_r2
            ));
            run.out.add_json("surrogate_ridge.json", &ridge)?;
            run.out.add_json("surrogate_tree.json", &tree)
        }
        Method::Lime | Method::Shap => {
            run.option("split", part.label());
            let forecast = run.rolling(&model, &prepared, part)?;
            let picks = pick_instances(run, args, &forecast)?;
            let is_lime = args.method == Method::Lime;
            if is_lime {
                run.option("samples", args.samples);
            }
            let mut cases = BTreeMap::new();
            for (label, i) in picks {
                let instance = &forecast.inputs[i];
                let attribution = if is_lime {
                    let cfg = LimeConfig {
                        n_samples: args.samples,
                        seed: run.cfg.seed,
                        ..LimeConfig::default()
                    };
                    let lime = lime_explain(&model, instance, &train_x, &cfg)?;
                    run.out.add_json(&format!("lime_{label}.json"), &versioned(&lime))?;
                    lime.attribution
                } else {
                    let a = shap_exact(&model, &prepared.names, instance, &means)?;
                    run.out.add_json(&format!("shap_{label}.json"), &a)?;
                    a
                };
                run.out.add_with(&format!("{method}_{label}_force.csv"), |buf| attribution.write_force_csv(buf))?;
                cases.insert(label, case_info(&forecast, i, &attribution));
            }
            run.out.add_json(&format!("{method}_cases.json"), &versioned(Cases { cases }))
        }
        Method::Pffra => {
            let feature = args.feature.clone().unwrap_or_else(|| columns::MVART.to_string());
            run.option("feature", &feature);
            run.option("mode", format!("{:?}", args.mode).to_lowercase());
            run.option("hann", args.hann);
            let opts = PffraOptions {
                window: if args.hann { Window::Hann } else { Window::Rectangular },
                ..PffraOptions::default()
            };
            let parts: Vec<Part> = match args.split {
                Some(s) => vec![part_of(s)],
                None => Part::ALL.to_vec(),
            };
            run.option("split", parts.iter().map(|p| p.label()).collect::<Vec<_>>().join(","));
            for p in parts {
                let report = match args.mode {
                    PffraMode::Static => pffra(&model, &prepared.design(p)?, &feature, &means, &opts)?,
                    PffraMode::Rolling => pffra_rolling(
                        &model,
                        &prepared.context(p)?,
                        &prepared.names,
                        run.cfg.engineering.mva_window,
                        &run.cfg.forecast,
                        &feature,
                        &means,
                        &opts,
                    )?,
                };
                if let Some(share) = report.feature_only_share("low") {
                    run.note(format!("{}: {feature}-only low-band share {share:.3}", p.label()));
                }
                let label = p.label();
                run.out.add_with(&format!("spectrum_{feature}_{label}.csv"), |buf| write_spectra(&report, buf))?;
                run.out.add_json(&format!("pffra_{feature}_{label}.json"), &report)?;
            }
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct CaseInfo {
    row: usize,
    timestamp: String,
    y_true: f64,
    y_pred: f64,
    base_value: f64,
}

#[derive(Serialize)]
struct Cases {
    cases: BTreeMap<String, CaseInfo>,
}

fn case_info(run: &ForecastRun, i: usize, a: &Attribution) -> CaseInfo {
    CaseInfo {
        row: i,
        timestamp: stamp(run.timestamps[i]),
        y_true: run.y_true[i],
        y_pred: run.y_pred[i],
        base_value: a.base_value,
    }
}

/// Forecast rows to explain, labelled for the output file names.
fn pick_instances(run: &mut Run, args: &ExplainArgs, forecast: &ForecastRun) -> Result<Vec<(String, usize)>> {
    if args.select.is_empty() {
        if args.index >= forecast.len() {
            return Err(Error::Config(format!(
                "--index {} is past the {} forecast rows",
                args.index,
                forecast.len()
            )));
        }
        run.option("index", args.index);
        return Ok(vec![(format!("row{}", args.index), args.index)]);
    }
    run.option("threshold_acc", args.threshold_acc);
    run.option("threshold_dev", args.threshold_dev);
    let pair = select_case_pair(&forecast.y_true, &forecast.y_pred, args.threshold_acc, args.threshold_dev)
        .ok_or_else(|| {
            Error::Input(format!(
                "no forecast pair shares a true value with error below {} and above {}",
                args.threshold_acc, args.threshold_dev
            ))
        })?;
    let mut picks = Vec::new();
    for kind in &args.select {
        let item = match kind {
            CaseKind::Accurate => ("accurate".to_string(), pair.accurate),
            CaseKind::Deviated => ("deviated".to_string(), pair.deviated),
        };
        if !picks.contains(&item) {
            picks.push(item);
        }
    }
    run.option(
        "select",
        picks.iter().map(|p| p.0.as_str()).collect::<Vec<_>>().join(","),
    );
    Ok(picks)
}

fn write_spectra(report: &PffraReport, buf: &mut Vec<u8>) -> Result<()> {
    let spectra = [
        &report.spectrum_feature_only,
        &report.spectrum_feature_permuted,
        &report.spectrum_original,
        &report.spectrum_truth,
    ];
    let mut w = csv::Writer::from_writer(buf);
    w.write_record(["frequency", "feature_only", "feature_permuted", "original", "truth"])?;
    let mut record = vec!["0".to_string()];
    record.extend(spectra.iter().map(|s| s.dc.to_string()));
    w.write_record(&record)?;
    for k in 0..report.spectrum_original.frequencies.len() {
        let mut record = vec![report.spectrum_original.frequencies[k].to_string()];
        record.extend(spectra.iter().map(|s| s.magnitudes[k].to_string()));
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

fn diagnose(run: &mut Run, args: &DiagnoseArgs) -> Result<()> {
    let table = run.cfg.load_data()?;
    let parts = split(&table, &run.cfg.split)?;
    let all = TimeTable::concat(&[parts.train.clone(), parts.validation.clone(), parts.test.clone()])?;
    let rt = all.target();
    let which = format!("{:?}", args.which).to_lowercase();
    run.option("which", &which);
    match args.which {
        Diagnostic::Acf | Diagnostic::Pacf => {
            run.option("max_lag", args.max_lag);
            let values = if args.which == Diagnostic::Acf {
                acf(rt, args.max_lag)?
            } else {
                pacf(rt, args.max_lag)?
            };
            run.out.add_with(&format!("{which}_rt.csv"), |buf| {
                write_pairs(
                    buf,
                    ["lag", which.as_str()],
                    values.iter().enumerate().map(|(k, v)| (k.to_string(), v.to_string())),
                )
            })
        }
        Diagnostic::Adf => {
            let level = adf_test(rt, None)?;
            let diff: Vec<f64> = rt.windows(2).map(|w| w[1] - w[0]).collect();
            let differenced = adf_test(&diff, None)?;
            run.note(format!(
                "ADF statistic: level {:.3}, first difference {:.3}",
                level.statistic, differenced.statistic
            ));
            run.out.add_json("adf_rt.json", &versioned(&level))?;
            run.out.add_json("adf_rt_diff.json", &versioned(&differenced))
        }
        Diagnostic::Hist => {
            if !(args.bin_width > 0.0) {
                return Err(Error::Config(format!("--bin-width must be positive, got {}", args.bin_width)));
            }
            run.option("bin_width", args.bin_width);
            for (label, t) in [
                ("train", &parts.train),
                ("validation", &parts.validation),
                ("test", &parts.test),
            ] {
                let hist = histogram(t.target(), args.bin_width)?;
                run.out.add_with(&format!("hist_rt_{label}.csv"), |buf| {
                    write_pairs(buf, ["bin_start", "count"], hist.iter().map(|(b, c)| (b.to_string(), c.to_string())))
                })?;
            }
            Ok(())
        }
    }
}
