//! End-to-end runs of the `roomcast` binary on a small synthetic configuration.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const SMALL: &str = "\
synth.days = 60
split.data_start = 2017-12-08
split.train_end = 2018-01-20
split.val_end = 2018-01-28
split.data_cutoff = 2018-02-05
gbm.max_depth = 4
gbm.n_trees = 20
grid.max_depth = 3,4
grid.n_trees = 5,10
grid.gamma = 0.5
grid.lambda = 1
grid.learning_rate = 0.3
";

struct Sandbox {
    dir: tempfile::TempDir,
}

impl Sandbox {
    fn new() -> Sandbox {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("small.cfg"), SMALL).unwrap();
        Sandbox { dir }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    /// Runs with the small config and `--out <name>`.
    fn run(&self, out: &str, args: &[&str]) -> Output {
        Command::new(env!("CARGO_BIN_EXE_roomcast"))
            .arg("--quiet")
            .arg("--config")
            .arg(self.path("small.cfg"))
            .arg("--out")
            .arg(self.path(out))
            .args(args)
            .output()
            .unwrap()
    }

    fn ok(&self, out: &str, args: &[&str]) -> PathBuf {
        let o = self.run(out, args);
        assert!(
            o.status.success(),
            "{args:?} failed: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        self.path(out)
    }

    fn model(&self) -> PathBuf {
        let m = self.path("model/model.json");
        if !m.exists() {
            self.ok("model", &["train"]);
        }
        m
    }
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn csv_rows(path: &Path) -> Vec<csv::StringRecord> {
    csv::Reader::from_path(path)
        .unwrap()
        .records()
        .map(Result::unwrap)
        .collect()
}

fn header(path: &Path) -> Vec<String> {
    csv::Reader::from_path(path)
        .unwrap()
        .headers()
        .unwrap()
        .iter()
        .map(str::to_string)
        .collect()
}

/// Every manifest entry matches the file on disk.
fn check_manifest(dir: &Path) -> Value {
    use sha2::{Digest, Sha256};
    let manifest = json(&dir.join("manifest.json"));
    assert_eq!(manifest["schema_version"], 1);
    for a in manifest["artifacts"].as_array().unwrap() {
        let data = std::fs::read(dir.join(a["path"].as_str().unwrap())).unwrap();
        let digest: String = Sha256::digest(&data).iter().map(|b| format!("{b:02x}")).collect();
        assert_eq!(a["sha256"].as_str().unwrap(), digest);
        assert_eq!(a["bytes"].as_u64().unwrap() as usize, data.len());
    }
    manifest
}

#[test]
fn synth_writes_144_rows_per_day_and_is_reproducible() {
    let sb = Sandbox::new();
    let a = sb.ok("a", &["synth", "--days", "5", "--seed", "7"]);
    let b = sb.ok("b", &["synth", "--days", "5", "--seed", "7"]);
    assert_eq!(csv_rows(&a.join("synth.csv")).len(), 5 * 144);
    let ma = check_manifest(&a);
    assert_eq!(ma, json(&b.join("manifest.json")));
    assert_eq!(ma["seed"], 7);
    let c = sb.ok("c", &["synth", "--days", "5", "--seed", "8"]);
    assert_ne!(ma["artifacts"], json(&c.join("manifest.json"))["artifacts"]);
}

#[test]
fn exit_codes() {
    let sb = Sandbox::new();
    let o = sb.run("zero", &["synth", "--days", "0"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("n_days"));
    assert!(!sb.path("zero").exists());

    assert_eq!(code(&sb.run("m", &["evaluate", "--model", "missing.json"])), 2);
    assert_eq!(code(&sb.run("u", &["frobnicate"])), 2);
    assert_eq!(code(&sb.run("k", &["--set", "nope=1", "split"])), 2);

    let o = sb.run("x", &["explain", "bogus", "--model", "m.json"]);
    assert_eq!(code(&o), 2);
    let err = String::from_utf8_lossy(&o.stderr).to_string();
    for m in ["importance", "pdp", "surrogate", "lime", "shap", "pffra"] {
        assert!(err.contains(m), "{err}");
    }

    std::fs::write(sb.path("bad.csv"), "timestamp,RT\n2019-07-01T00:00:00Z,warm\n").unwrap();
    let bad = sb.path("bad.csv");
    assert_eq!(code(&sb.run("i", &["ingest", "--csv", bad.to_str().unwrap()])), 3);
}

#[test]
fn output_directory_is_write_once() {
    let sb = Sandbox::new();
    sb.ok("o", &["synth", "--days", "1"]);
    assert_eq!(code(&sb.run("o", &["synth", "--days", "1"])), 2);
    sb.ok("o", &["--force", "synth", "--days", "2"]);
}

#[test]
fn ingest_round_trips_synth_output() {
    let sb = Sandbox::new();
    let s = sb.ok("s", &["synth", "--days", "3"]);
    let src = s.join("synth.csv");
    let i = sb.ok("i", &["ingest", "--csv", src.to_str().unwrap()]);
    assert_eq!(
        std::fs::read(&src).unwrap(),
        std::fs::read(i.join("data.csv")).unwrap()
    );
    let summary = json(&i.join("ingest.json"));
    assert_eq!(summary["span"]["rows"], 432);
    let manifest = check_manifest(&i);
    assert!(manifest["inputs"]["data"].is_string());
}

#[test]
fn split_partitions_cover_the_range() {
    let sb = Sandbox::new();
    let d = sb.ok("s", &["split"]);
    let rows: usize = ["train", "validation", "test"]
        .iter()
        .map(|p| csv_rows(&d.join(format!("{p}.csv"))).len())
        .sum();
    assert_eq!(rows, 60 * 144);
    assert_eq!(json(&d.join("split.json"))["parts"]["validation"]["rows"], 8 * 144);
}

#[test]
fn train_fixed_and_grid() {
    let sb = Sandbox::new();
    let a = sb.ok("a", &["train"]);
    let b = sb.ok("b", &["train"]);
    assert_eq!(
        std::fs::read(a.join("model.json")).unwrap(),
        std::fs::read(b.join("model.json")).unwrap()
    );
    assert!(!a.join("grid_scores.csv").exists());
    let trace = csv_rows(&a.join("training_trace.csv"));
    assert_eq!(trace.len(), 21);
    let m = json(&a.join("metrics.json"));
    assert_eq!(m["tuning"], "fixed");
    assert!(m["metrics"]["validation"]["rolling"]["mae"].as_f64().unwrap() > 0.0);

    let g = sb.ok("g", &["train", "--grid"]);
    assert_eq!(
        header(&g.join("grid_scores.csv")),
        ["max_depth", "n_trees", "gamma", "lambda", "learning_rate", "mse", "mae", "mape", "r2"]
    );
    assert_eq!(csv_rows(&g.join("grid_scores.csv")).len(), 4);
    assert_eq!(json(&g.join("metrics.json"))["tuning"], "grid");
}

#[test]
fn evaluate_residuals_match_scored_predictions() {
    let sb = Sandbox::new();
    let model = sb.model();
    let e = sb.ok("e", &["evaluate", "--model", model.to_str().unwrap()]);
    let m = json(&e.join("metrics.json"));
    for part in ["train", "validation", "test"] {
        let forecast = csv_rows(&e.join(format!("forecast_{part}.csv")));
        let residuals = csv_rows(&e.join(format!("residuals_{part}.csv")));
        assert_eq!(forecast.len(), residuals.len());
        let hist_total: usize = csv_rows(&e.join(format!("residual_hist_{part}.csv")))
            .iter()
            .map(|r| r[1].parse::<usize>().unwrap())
            .sum();
        assert_eq!(hist_total, residuals.len());
        assert_eq!(csv_rows(&e.join(format!("residual_qq_{part}.csv"))).len(), residuals.len());
        // MAE recomputed from the residual file.
        let mae = residuals.iter().map(|r| r[1].parse::<f64>().unwrap().abs()).sum::<f64>()
            / residuals.len() as f64;
        let reported = m["metrics"][part]["rolling"]["mae"].as_f64().unwrap();
        assert!((mae - reported).abs() < 1e-9);
    }
    let manifest = check_manifest(&e);
    assert!(manifest["inputs"]["model"].is_string());
}

#[test]
fn evaluate_rejects_model_for_other_features() {
    let sb = Sandbox::new();
    let model = sb.model();
    let o = sb.run(
        "e",
        &["--set", "features.groups=IOTS", "evaluate", "--model", model.to_str().unwrap()],
    );
    assert_eq!(code(&o), 2);
}

#[test]
fn ablate_table_schema_and_single_group() {
    let sb = Sandbox::new();
    let a = sb.ok("a", &["ablate", "--groups", "IOTS;IOTS-MVA,MVART,Holiday", "--skip-sweeps"]);
    assert_eq!(header(&a.join("ablation.csv")), ["group", "mse", "mae", "mape", "r2"]);
    let rows = csv_rows(&a.join("ablation.csv"));
    assert_eq!(rows.len(), 2);
    let mae = |i: usize| rows[i][2].parse::<f64>().unwrap();
    assert!(mae(1) < mae(0));

    let one = sb.ok("one", &["ablate", "--groups", "IOTS", "--skip-sweeps"]);
    assert_eq!(csv_rows(&one.join("ablation.csv")).len(), 1);
}

#[test]
fn ablate_writes_sweeps() {
    let sb = Sandbox::new();
    let a = sb.ok("a", &["ablate", "--groups", "IOTS"]);
    let widths: Vec<String> = csv_rows(&a.join("window_sweep.csv")).iter().map(|r| r[0].to_string()).collect();
    assert_eq!(widths, ["0", "10", "60", "180", "480", "1440"]);
    assert_eq!(csv_rows(&a.join("horizon_sweep.csv")).len(), 4);
}

#[test]
fn explain_global_methods() {
    let sb = Sandbox::new();
    let model = sb.model();
    let m = model.to_str().unwrap();

    let d = sb.ok("imp", &["explain", "importance", "--model", m]);
    let imp = json(&d.join("importance.json"));
    assert_eq!(imp["schema_version"], 1);
    assert_eq!(imp["gain"].as_object().unwrap().len(), 11);

    let d = sb.ok("pdp", &["explain", "pdp", "--model", m, "--feature", "MVART", "--grid-size", "15"]);
    assert_eq!(csv_rows(&d.join("pdp_MVART.csv")).len(), 15);
    assert_eq!(json(&d.join("pdp_MVART.json"))["feature"], "MVART");

    let d = sb.ok("sur", &["explain", "surrogate", "--model", m, "--depth", "2"]);
    let tree = json(&d.join("surrogate_tree.json"));
    assert_eq!(tree["max_depth"], 2);
    assert!(json(&d.join("surrogate_ridge.json"))["fidelity_r2"].as_f64().unwrap() > 0.5);

    let o = sb.run("pdpx", &["explain", "pdp", "--model", m, "--feature", "Nope"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn explain_shap_selects_two_cases() {
    let sb = Sandbox::new();
    let model = sb.model();
    let d = sb.ok(
        "shap",
        &[
            "explain", "shap", "--model", model.to_str().unwrap(),
            "--select", "accurate,deviated", "--threshold-acc", "0.01", "--threshold-dev", "1.0",
            "--split", "test",
        ],
    );
    let cases = json(&d.join("shap_cases.json"));
    for kind in ["accurate", "deviated"] {
        let a = json(&d.join(format!("shap_{kind}.json")));
        let phi: f64 = a["contributions"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).sum();
        let pred = a["prediction"].as_f64().unwrap();
        assert!((a["base_value"].as_f64().unwrap() + phi - pred).abs() < 1e-6);
        // The explained input is the one the rolling forecast used.
        assert!((cases["cases"][kind]["y_pred"].as_f64().unwrap() - pred).abs() < 1e-12);
        let force = csv_rows(&d.join(format!("shap_{kind}_force.csv")));
        assert_eq!(force.len(), 11 + 2);
    }
    let c = &cases["cases"];
    assert_eq!(c["accurate"]["y_true"], c["deviated"]["y_true"]);
    assert!((c["accurate"]["y_true"].as_f64().unwrap() - c["accurate"]["y_pred"].as_f64().unwrap()).abs() < 0.01);
}

#[test]
fn explain_lime_single_row() {
    let sb = Sandbox::new();
    let model = sb.model();
    let d = sb.ok(
        "lime",
        &["explain", "lime", "--model", model.to_str().unwrap(), "--index", "3", "--samples", "500"],
    );
    let l = json(&d.join("lime_row3.json"));
    assert_eq!(l["schema_version"], 1);
    let r2 = l["local_r2"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&r2));
}

#[test]
fn explain_pffra_per_split() {
    let sb = Sandbox::new();
    let model = sb.model();
    let d = sb.ok("p", &["explain", "pffra", "--model", model.to_str().unwrap(), "--feature", "MVART"]);
    for part in ["train", "validation", "test"] {
        let r = json(&d.join(format!("pffra_MVART_{part}.json")));
        assert_eq!(r["mode"], "static");
        assert_eq!(r["feature"], "MVART");
        let spectra = csv_rows(&d.join(format!("spectrum_MVART_{part}.csv")));
        assert_eq!(spectra[0][0].to_string(), "0");
    }
    let d = sb.ok(
        "r",
        &[
            "--set", "forecast.horizon_minutes=1440",
            "explain", "pffra", "--model", model.to_str().unwrap(), "--mode", "rolling", "--split", "test",
        ],
    );
    assert_eq!(json(&d.join("pffra_MVART_test.json"))["mode"], "rolling");
}

#[test]
fn diagnose_outputs() {
    let sb = Sandbox::new();
    for which in ["acf", "pacf"] {
        let d = sb.ok(which, &["diagnose", which, "--max-lag", "30"]);
        let rows = csv_rows(&d.join(format!("{which}_rt.csv")));
        assert_eq!(rows.len(), 31);
        assert_eq!(rows[0][1].parse::<f64>().unwrap(), 1.0);
    }
    let d = sb.ok("adf", &["diagnose", "adf"]);
    for f in ["adf_rt.json", "adf_rt_diff.json"] {
        let r = json(&d.join(f));
        assert_eq!(r["schema_version"], 1);
        assert!(r["statistic"].is_number());
    }
    let d = sb.ok("hist", &["diagnose", "hist", "--bin-width", "1"]);
    let total: usize = ["train", "validation", "test"]
        .iter()
        .flat_map(|p| csv_rows(&d.join(format!("hist_rt_{p}.csv"))))
        .map(|r| r[1].parse::<usize>().unwrap())
        .sum();
    assert_eq!(total, 60 * 144);
}
