use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn svinv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_svinv")).args(args).env_remove("SVINV_SEED").output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let o = svinv(args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn generate_minimal_suite() {
    let t = tempfile::tempdir().unwrap();
    let d = t.path().join("d");
    ok(&["generate", "--per-subgroup", "1", "--seed", "7", "--out", p(&d)]);
    let labels = fs::read_to_string(d.join("labels.csv")).unwrap();
    assert_eq!(labels.lines().count(), 16);
    assert_eq!(fs::metadata(d.join("models.f32")).unwrap().len(), 15 * 40_000);
    assert!(d.join("run_config.toml").exists());
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["n_samples"], 15);
    assert_eq!(manifest["suite_seed"], 7);
}

#[test]
fn echoed_config_reproduces_outputs() {
    let t = tempfile::tempdir().unwrap();
    let (a, b) = (t.path().join("a"), t.path().join("b"));
    ok(&["generate", "--layers", "5..6", "--per-subgroup", "2", "--seed", "11", "--out", p(&a)]);
    let echo = a.join("run_config.toml");
    ok(&["--config", p(&echo), "generate", "--out", p(&b)]);
    assert_eq!(fs::read(a.join("models.f32")).unwrap(), fs::read(b.join("models.f32")).unwrap());
    assert_eq!(fs::read(a.join("manifest.json")).unwrap(), fs::read(b.join("manifest.json")).unwrap());
    assert_eq!(fs::read(&echo).unwrap(), fs::read(b.join("run_config.toml")).unwrap());
}

#[test]
fn seed_falls_back_to_environment() {
    let t = tempfile::tempdir().unwrap();
    let (a, b) = (t.path().join("a"), t.path().join("b"));
    ok(&["generate", "--layers", "4", "--seed", "21", "--out", p(&a)]);
    let o = Command::new(env!("CARGO_BIN_EXE_svinv"))
        .args(["generate", "--layers", "4", "--out", p(&b)])
        .env("SVINV_SEED", "21")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(fs::read(a.join("models.f32")).unwrap(), fs::read(b.join("models.f32")).unwrap());
}

#[test]
fn usage_errors_exit_2() {
    let t = tempfile::tempdir().unwrap();
    let o = svinv(&["generate", "--out", p(t.path()), "--bogus"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(svinv(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn unstable_simulation_exits_3() {
    let t = tempfile::tempdir().unwrap();
    let d = t.path().join("d");
    ok(&["generate", "--layers", "4", "--categories", "salt", "--seed", "1", "--out", p(&d)]);
    let o = svinv(&["simulate", "--models", p(&d), "--out", p(&t.path().join("s")), "--dt", "0.0015"]);
    assert_eq!(o.status.code(), Some(3));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("stability"), "{err}");
    assert!(err.starts_with("error[stability]"));
    let o = svinv(&["simulate", "--models", p(&d), "--out", p(&t.path().join("s")), "--order", "4"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn help_documents_published_defaults() {
    let sim = ok(&["simulate", "--help"]);
    for s in ["0.001", "[default: 7]", "1000", "[default: 20]", "--jobs"] {
        assert!(sim.contains(s), "missing {s}");
    }
    let fwi = ok(&["fwi", "--help"]);
    assert!(fwi.contains("10,15,20,25,30") && fwi.contains("[default: 50]") && fwi.contains("[default: 5]"));
    let split = ok(&["split", "--help"]);
    assert!(split.contains("800") && split.contains("50,100,200,300,400"));
    let noise = ok(&["add-noise", "--help"]);
    assert!(noise.contains("0.05") && noise.contains("0.20"));
}

#[test]
fn end_to_end_pipeline() {
    let t = tempfile::tempdir().unwrap();
    let root = t.path();
    let (d, s, n) = (root.join("models"), root.join("clean"), root.join("noisy"));
    ok(&["generate", "--layers", "4", "--categories", "layered,fault", "--per-subgroup", "3", "--seed", "5", "--out", p(&d)]);
    ok(&["--jobs", "1", "simulate", "--models", p(&d), "--out", p(&s), "--nt", "300"]);
    assert_eq!(fs::metadata(s.join("records.f32")).unwrap().len(), 6 * 4 * 20 * 300 * 34);
    assert_eq!(fs::read(d.join("models.f32")).unwrap(), fs::read(s.join("models.f32")).unwrap());

    ok(&["add-noise", "--in", p(&s), "--out", p(&n), "--seed", "9"]);
    let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(n.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["noise"], true);
    assert_eq!(m["noise_config"]["seed"], 9);
    assert_ne!(fs::read(s.join("records.f32")).unwrap(), fs::read(n.join("records.f32")).unwrap());
    let o = svinv(&["add-noise", "--in", p(&n), "--out", p(&root.join("twice"))]);
    assert_eq!(o.status.code(), Some(3));

    let sp = root.join("splits.json");
    let line = ok(&["split", "--dataset", p(&s), "--test-per-subgroup", "1", "--train-sizes", "1,2", "--seed", "3", "--out", p(&sp)]);
    assert_eq!(line.trim(), "test=2 TD-I=2 TD-II=4");
    let splits: serde_json::Value = serde_json::from_str(&fs::read_to_string(&sp).unwrap()).unwrap();
    assert_eq!(splits["test"].as_array().unwrap().len(), 2);
    assert!(root.join("splits.run_config.toml").exists());

    let e = root.join("exports");
    ok(&["export-profile", "--dataset", p(&s), "--model", "2", "--column", "50", "--pgm", "--out", p(&e)]);
    let prof = fs::read_to_string(e.join("profile_2_col50.csv")).unwrap();
    let rows: Vec<&str> = prof.lines().collect();
    assert_eq!(rows.len(), 101);
    assert_eq!(rows[0], "depth_m,velocity_m_s");
    assert!(rows[100].starts_with("693,"));
    assert_eq!(fs::metadata(e.join("model_2.pgm")).unwrap().len(), 15 + 100 * 100);
    ok(&["export-gather", "--dataset", p(&n), "--sample", "1", "--shot", "3", "--out", p(&e)]);
    let g = fs::read_to_string(e.join("gather_1_shot3.csv")).unwrap();
    assert_eq!(g.lines().count(), 301);
    assert_eq!(g.lines().next().unwrap().split(',').count(), 35);

    let rep = root.join("report.json");
    ok(&["evaluate", "--pred", p(&d), "--target", p(&s), "--report", p(&rep)]);
    let r: serde_json::Value = serde_json::from_str(&fs::read_to_string(&rep).unwrap()).unwrap();
    assert_eq!(r["overall"]["count"], 6);
    assert_eq!(r["overall"]["l1"], 0.0);
    assert!(r["subgroups"]["4-fault"].is_object());

    let f = root.join("fwi");
    let out = ok(&[
        "fwi", "--obs", p(&s), "--model-index", "0", "--sigma", "5", "--cutoffs", "10,15", "--iters", "2", "--out", p(&f),
    ]);
    assert!(out.contains("ratio"));
    let csv = fs::read_to_string(f.join("misfit.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("iteration,stage,misfit"));
    let prof = fs::read_to_string(f.join("profile.csv")).unwrap();
    assert_eq!(prof.lines().count(), 101);
    assert!(f.join("inverted/models.f32").exists() && f.join("summary.json").exists() && f.join("run_config.toml").exists());
    let echo = fs::read_to_string(f.join("run_config.toml")).unwrap();
    assert!(echo.contains("n_t = 300") && echo.contains("total_iterations = 2"));
}

#[test]
fn out_of_range_predictions_need_clamp() {
    let t = tempfile::tempdir().unwrap();
    let d = t.path().join("d");
    ok(&["generate", "--layers", "4", "--categories", "layered", "--seed", "2", "--out", p(&d)]);
    let pred = t.path().join("pred");
    fs::create_dir_all(&pred).unwrap();
    for f in ["manifest.json", "labels.csv"] {
        fs::copy(d.join(f), pred.join(f)).unwrap();
    }
    let bytes: Vec<u8> = (0..10_000).flat_map(|_| 1400.0f32.to_le_bytes()).collect();
    fs::write(pred.join("models.f32"), bytes).unwrap();
    let rep = t.path().join("r.json");
    let o = svinv(&["evaluate", "--pred", p(&pred), "--target", p(&d), "--report", p(&rep)]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error[range]"));
    ok(&["evaluate", "--pred", p(&pred), "--target", p(&d), "--report", p(&rep), "--clamp"]);
}
