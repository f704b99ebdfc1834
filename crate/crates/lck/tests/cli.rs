use std::path::{Path, PathBuf};
use std::sync::{Mutex, MutexGuard};

use lck::cli::{run, EXIT_FAIL, EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE};
use lck::config::RunConfig;
use lck::output::{from_csv, TraceRow, VariationRow};
use lck::snapshot;
use lck_core::fields::generators;
use lck_core::fields::TorusGeometry;
use tempfile::TempDir;

// The fault switch is process-global, so every command runs under one lock.
static LOCK: Mutex<()> = Mutex::new(());

fn lock() -> MutexGuard<'static, ()> {
    LOCK.lock().unwrap_or_else(|e| e.into_inner())
}

fn lck(args: &[&str]) -> i32 {
    run(std::iter::once("lck").chain(args.iter().copied()))
}

fn write_config(dir: &Path, json: &str) -> PathBuf {
    let p = dir.join("run.json");
    std::fs::write(&p, json).unwrap();
    p
}

fn with_config(json: &str, extra: &[&str]) -> (TempDir, i32) {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), json);
    let out = dir.path().join("out");
    let mut args = vec!["--quiet", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    let code = lck(&args);
    (dir, code)
}

fn read(dir: &TempDir, name: &str) -> String {
    std::fs::read_to_string(dir.path().join("out").join(name)).unwrap()
}

fn key_values(text: &str) -> Vec<(String, String)> {
    text.lines()
        .map(|l| {
            let (k, v) = l.split_once('=').unwrap();
            (k.trim().to_string(), v.trim().to_string())
        })
        .collect()
}

#[test]
fn quick_verify_passes_and_tags_rows() {
    let _g = lock();
    let (dir, code) = with_config("{}", &["verify", "--quick"]);
    assert_eq!(code, EXIT_OK);
    let report = read(&dir, "verify.txt");
    for tag in ["Eq.3", "Eq.4", "Lemma 4.2", "Lemma 2.2", "Lemma 2.3", "Eq.11", "Eq.12", "Formula 2.4", "Lemma 2.5",
        "Eq.19", "Eq.20", "Prop.6.1", "Eq.13", "Eq.14", "Eq.15", "Eq.17", "Eq.18", "Eq.21", "Cor.4.4", "Cor.4.5",
        "Cor.5.1", "Prop.5.3", "Prop.6.2", "Lemma 3.2"]
    {
        assert!(report.contains(&format!(" {tag} ")), "missing {tag}");
    }
    assert!(report.ends_with("0 failed\n"));
    assert!(!report.contains("FAIL"));
}

#[test]
fn star_sign_fault_is_detected() {
    let _g = lock();
    lck_core::faults::set_star_sign_flip(true);
    let (dir, code) = with_config("{}", &["verify", "--quick"]);
    lck_core::faults::set_star_sign_flip(false);
    assert_eq!(code, EXIT_FAIL);
    let report = read(&dir, "verify.txt");
    let failed: Vec<&str> = report.lines().filter(|l| l.starts_with("FAIL")).collect();
    assert!(failed.iter().any(|l| l.contains(" Eq.3 ")), "{report}");
    assert!(failed.iter().all(|l| !l.contains(" Eq.4 ")));
}

#[test]
fn configuration_errors_exit_with_usage_code() {
    let _g = lock();
    for json in [
        r#"{"bogus": 1}"#,
        r#"{"metric": {"seed": 1, "colour": "red"}}"#,
        r#"{"n": 5}"#,
        r#"{"n": 1}"#,
        r#"{"n": 2, "grid": 7}"#,
        r#"{"n": 3, "grid": 64}"#,
        r#"{"n": 2, "grid": 8, "metric": {"bandwidth": 3}}"#,
        r#"{"n": 2, "functional": "normalized"}"#,
        r#"{"metric": {"preset": "snapshot"}}"#,
        r#"{"flow": {"backtrack": 1.5}}"#,
        r#"{"command": "dance"}"#,
        "not json",
    ] {
        let (_d, code) = with_config(json, &["eval"]);
        assert_eq!(code, EXIT_USAGE, "{json}");
    }
    assert_eq!(lck(&["--quiet", "--config", "/nonexistent/run.json", "eval"]), EXIT_USAGE);
    assert_eq!(lck(&["--no-such-flag"]), EXIT_USAGE);
    assert_eq!(lck(&["--tol-scale", "-1", "eval"]), EXIT_USAGE);
    assert_eq!(lck(&["--quiet", "report"]), EXIT_USAGE);
}

#[test]
fn eval_on_flat_metric_vanishes() {
    let _g = lock();
    for n in [2, 3] {
        let json = format!(r#"{{"n": {n}, "grid": 4, "metric": {{"preset": "flat"}}}}"#);
        let (dir, code) = with_config(&json, &["eval"]);
        assert_eq!(code, EXIT_OK);
        let kv = key_values(&read(&dir, "eval.txt"));
        let get = |k: &str| kv.iter().find(|(a, _)| a == k).unwrap().1.clone();
        assert_eq!(get("preset"), "flat");
        assert_eq!(get("value").parse::<f64>().unwrap(), 0.0);
        assert_eq!(get("margin").parse::<f64>().unwrap(), 1.0);
        let skip = ["n", "grid", "preset", "seed", "regime", "margin"];
        for (k, v) in kv.iter().filter(|(k, _)| !skip.contains(&k.as_str())) {
            assert!(v.parse::<f64>().unwrap().abs() <= 1e-10, "{k} = {v}");
        }
    }
}

#[test]
fn eval_reports_normalized_value_and_is_repeatable() {
    let _g = lock();
    let json = r#"{"n": 3, "grid": 4, "functional": "normalized"}"#;
    let (a, code) = with_config(json, &["eval"]);
    assert_eq!(code, EXIT_OK);
    let (b, _) = with_config(json, &["eval"]);
    let text = read(&a, "eval.txt");
    assert_eq!(text, read(&b, "eval.txt"));
    let kv = key_values(&text);
    let get = |k: &str| kv.iter().find(|(a, _)| a == k).unwrap().1.parse::<f64>().unwrap();
    let (l, norm, nl) = (get("value"), get("normalizer"), get("normalized"));
    assert!(l > 0.0 && norm > 0.0);
    assert!((nl - l / norm.powi(2)).abs() <= 1e-6 * nl);
}

#[test]
fn grad_check_rows_agree_with_finite_differences() {
    let _g = lock();
    for json in [
        r#"{"n": 3, "grid": 4, "directions": {"count": 3}}"#,
        r#"{"n": 2, "grid": 8, "directions": {"count": 2}}"#,
        r#"{"n": 3, "grid": 4, "functional": "normalized", "directions": {"count": 2}}"#,
    ] {
        let (dir, code) = with_config(json, &["grad-check"]);
        assert_eq!(code, EXIT_OK, "{json}");
        let rows: Vec<VariationRow> = from_csv(&read(&dir, "grad_check.csv")).unwrap();
        assert!(!rows.is_empty());
        for (k, r) in rows.iter().enumerate() {
            assert_eq!(r.direction_id, k);
            assert!(r.rel_err <= 1e-6, "{json}: {r:?}");
            assert!(r.order >= 1.8);
        }
    }
}

#[test]
fn grad_check_csv_header_and_report_summary() {
    let _g = lock();
    let (dir, code) = with_config(r#"{"n": 3, "grid": 4, "directions": {"count": 2}}"#, &["grad-check"]);
    assert_eq!(code, EXIT_OK);
    let csv = read(&dir, "grad_check.csv");
    assert_eq!(csv.lines().next().unwrap(), "n,N,preset,seed,direction-id,analytic,fd,rel_err,order");

    let input = dir.path().join("out").join("grad_check.csv");
    let out = dir.path().join("rep");
    let code = lck(&["--quiet", "--out", out.to_str().unwrap(), "report", input.to_str().unwrap(), input.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    let table = std::fs::read_to_string(out.join("report.txt")).unwrap();
    let row = table.lines().nth(1).unwrap();
    let cols: Vec<&str> = row.split_whitespace().collect();
    assert_eq!(&cols[..4], ["3", "4", "random-fourier", "4"]);
    assert_eq!(cols[6], "4");

    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "n,N\nx,y\n").unwrap();
    assert_eq!(lck(&["--quiet", "report", bad.to_str().unwrap()]), EXIT_USAGE);
}

#[test]
fn flow_trace_is_monotone_and_checkpoints_reload() {
    let _g = lock();
    let json = r#"{"n": 2, "grid": 8, "metric": {"amp": 0.05, "seed": 7},
        "flow": {"rel_value_tol": 0.01, "checkpoint_every": 2}}"#;
    let (dir, code) = with_config(json, &["flow"]);
    assert_eq!(code, EXIT_OK);
    let rows: Vec<TraceRow> = from_csv(&read(&dir, "trace.csv")).unwrap();
    assert!(rows.len() > 3);
    for (k, w) in rows.windows(2).enumerate() {
        assert_eq!(w[1].iter, k + 1);
        assert!(w[1].value <= w[0].value);
    }
    let last = rows.last().unwrap();
    assert!(last.value <= 0.01 * rows[0].value);

    let kv = key_values(&read(&dir, "flow.txt"));
    let get = |k: &str| kv.iter().find(|(a, _)| a == k).unwrap().1.clone();
    assert_eq!(get("status"), "converged");
    assert_eq!(get("iterations"), last.iter.to_string());
    assert_eq!(get("monotone"), "true");

    let geom = TorusGeometry::new(2, 8).unwrap();
    let out = dir.path().join("out");
    for r in rows.iter().filter(|r| r.iter > 0 && r.iter % 2 == 0) {
        let m = snapshot::read_metric(&out.join(format!("checkpoint_{:05}.json", r.iter))).unwrap();
        assert_eq!(m.geometry(), geom);
        let v = lck_core::lck::functional_value(&m).unwrap();
        assert!((v - r.value).abs() <= 1e-12 * r.value.max(1e-300), "iter {}", r.iter);
    }
    let fin = snapshot::read_metric(&out.join("final.json")).unwrap();
    let v = lck_core::lck::functional_value(&fin).unwrap();
    assert!((v - last.value).abs() <= 1e-12 * last.value);

    // restart from the final snapshot
    let json2 = format!(
        r#"{{"n": 2, "grid": 8, "metric": {{"preset": "snapshot", "path": {:?}}}, "flow": {{"max_iter": 1}}}}"#,
        out.join("final.json")
    );
    let (dir2, code) = with_config(&json2, &["flow"]);
    assert_eq!(code, EXIT_OK);
    let rows2: Vec<TraceRow> = from_csv(&read(&dir2, "trace.csv")).unwrap();
    assert!((rows2[0].value - last.value).abs() <= 1e-12 * last.value);
}

#[test]
fn unattainable_floor_is_a_numerical_failure() {
    let _g = lock();
    let json = r#"{"n": 2, "grid": 8, "metric": {"amp": 0.3},
        "flow": {"floor": 0.9999, "min_step": 0.001, "max_iter": 50}}"#;
    let (dir, code) = with_config(json, &["flow"]);
    assert_eq!(code, EXIT_NUMERICAL);
    let rows: Vec<TraceRow> = from_csv(&read(&dir, "trace.csv")).unwrap();
    assert!(!rows.is_empty());
}

#[test]
fn snapshot_mismatch_and_flat_start() {
    let _g = lock();
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("m.json");
    snapshot::write_metric(&p, &generators::flat(TorusGeometry::new(2, 4).unwrap())).unwrap();
    let json = format!(r#"{{"n": 2, "grid": 8, "metric": {{"preset": "snapshot", "path": {p:?}}}}}"#);
    let (_d, code) = with_config(&json, &["eval"]);
    assert_eq!(code, EXIT_USAGE);

    let json = r#"{"n": 2, "grid": 8, "metric": {"preset": "flat"}}"#;
    let (d, code) = with_config(json, &["flow"]);
    assert_eq!(code, EXIT_OK);
    let rows: Vec<TraceRow> = from_csv(&read(&d, "trace.csv")).unwrap();
    assert_eq!(rows.len(), 1);
}

#[test]
fn config_round_trips_through_json() {
    let cfg = RunConfig::default();
    assert_eq!(RunConfig::from_json(&cfg.to_json()).unwrap(), cfg);
    let text = r#"{
        "command": "grad-check", "n": 3, "grid": 6, "functional": "normalized",
        "metric": {"preset": "conformal-flat", "amp": 0.1, "seed": 9},
        "rho": {"preset": "kahler-potential", "seed": 4},
        "directions": {"count": 5, "seed": 7, "amp": 0.25},
        "profile": "quick",
        "flow": {"max_iter": 20, "checkpoint_every": 5},
        "tolerances": {"fd_rel": 1e-5},
        "out": "results", "inputs": ["a.csv"]
    }"#;
    let cfg = RunConfig::from_json(text).unwrap();
    assert_eq!(cfg.grid(), 6);
    assert_eq!(cfg.tolerances.fd_rel, 1e-5);
    assert_eq!(cfg.tolerances.riesz, 1e-6);
    assert_eq!(RunConfig::from_json(&cfg.to_json()).unwrap(), cfg);
}

#[test]
fn tolerance_scale_only_widens_upper_bounds() {
    let t = RunConfig::default().tolerances;
    let s = t.scaled(10.0);
    assert_eq!(s.lee, 10.0 * t.lee);
    assert_eq!(s.fd_order, t.fd_order);
    assert_eq!(s.noncritical_value, t.noncritical_value);
}

#[test]
fn snapshots_round_trip_exactly() {
    let geom = TorusGeometry::new(3, 4).unwrap();
    let m = generators::random_fourier(geom, 3, 0.2, 1).unwrap();
    let back = snapshot::metric_from_json(&snapshot::metric_to_json(&m)).unwrap();
    assert_eq!(back.data(), m.data());
    let f = generators::random_real_11(geom, 4, 0.3, 1).unwrap();
    let g = snapshot::form_from_json(&snapshot::form_to_json(&f)).unwrap();
    assert_eq!(g, f);
    assert!(snapshot::metric_from_json(&snapshot::form_to_json(&f)).is_err());
    let text = snapshot::metric_to_json(&m).replace("lck-field", "other");
    assert!(snapshot::metric_from_json(&text).is_err());
}
