use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use seqmech::cli::run::{WARN_BATCH_ALL_PAY, WARN_BOOST_THRESHOLD, WARN_FIRST_PRICE, WARN_GAP_FIGURES, WARN_ZERO_PROFIT};
use seqmech::cli::{columns, main_with, parse_config, run, Command, RunConfig, EXIT_CHECK_FAILED, EXIT_ERROR};
use seqmech::mc::Execution;

fn golden(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn config(text: &str) -> RunConfig {
    parse_config(text).unwrap()
}

fn warning_ids(cfg: &RunConfig) -> BTreeSet<String> {
    run(cfg, Execution::Sequential)
        .unwrap()
        .report
        .warnings
        .iter()
        .map(|w| w.split(':').next().unwrap().to_string())
        .collect()
}

fn small(command: &str, extra: &str) -> RunConfig {
    config(&format!(r#"{{"command": "{command}", "mc": {{"n": 200, "seed": 1}}{extra}}}"#))
}

#[test]
fn csv_headers_match_golden() {
    let cases = [
        ("batch_header.csv", small("batch", "")),
        ("boost_header.csv", small("boost", r#", "g": 4, "c": 1, "delta": 0.1"#)),
        ("latency_header.csv", small("latency", r#", "cost": {"family": "inverse", "c": 0.01}"#)),
        ("compare_header.csv", small("compare", r#", "g": 4, "c": 1, "delta": 0.2"#)),
        ("verify_header.csv", small("verify", "")),
    ];
    for (file, cfg) in cases {
        let out = run(&cfg, Execution::Sequential).unwrap();
        let csv = out.table.to_csv();
        let header = csv.lines().next().unwrap();
        assert_eq!(header, golden(file).trim_end(), "{file}");
        assert_eq!(header, columns(cfg.command).join(","));
        assert!(!out.table.rows().is_empty());
    }
}

#[test]
fn compare_sweep_matches_golden() {
    let cfg = config(r#"{"command": "compare", "g": 4, "c": 1, "grids": {"deltas": [0, 0.1, 0.2, 0.25, 1]}, "mc": {"n": 10}}"#);
    let out = run(&cfg, Execution::Sequential).unwrap();
    assert_eq!(out.table.to_csv(), golden("compare_sweep.csv"));
}

#[test]
fn discrepancy_warnings_present() {
    let latency = warning_ids(&small("latency", r#", "cost": {"family": "inverse", "c": 0.01}"#));
    assert!(latency.contains(WARN_ZERO_PROFIT) && latency.contains(WARN_GAP_FIGURES), "{latency:?}");

    let verify_cfg = small("verify", "");
    let verify = warning_ids(&verify_cfg);
    for id in [WARN_BOOST_THRESHOLD, WARN_FIRST_PRICE, WARN_BATCH_ALL_PAY] {
        assert!(verify.contains(id), "{id} missing from {verify:?}");
    }
    let report = run(&verify_cfg, Execution::Sequential).unwrap().report;
    assert!(report.audits.contains_key("boost_all_pay_threshold_slow"));
    assert!(report.audits.contains_key("boost_all_pay_threshold_fast"));

    let boost = warning_ids(&small("boost", r#", "g": 1, "c": 1, "delta": 0.25"#));
    assert!(boost.contains(WARN_BOOST_THRESHOLD));
    let boost = warning_ids(&small("boost", r#", "g": 1, "c": 1, "delta": 0"#));
    assert!(!boost.contains(WARN_BOOST_THRESHOLD));
}

#[test]
fn latency_report_labels_both_gap_figures() {
    let out = run(&small("latency", r#", "cost": {"family": "inverse", "c": 0.01}"#), Execution::Sequential).unwrap();
    let cf = &out.report.closed_form;
    let get = |k: &str| cf[k].as_f64().unwrap();
    assert!((get("misallocation_probability_per_sqrt_c") - 0.16016).abs() < 1e-5);
    assert!((get("welfare_gap_per_sqrt_c") - 0.05338).abs() < 1e-5);
    assert!((get("E_gap_closed") - 0.0320310).abs() < 1e-6);
    assert!((get("support_lower") - 0.02f64.sqrt()).abs() < 1e-12);
    assert!((get("profit_at_full_delay") + 0.01).abs() < 1e-9);
    assert!(out.passed);
}

#[test]
fn compare_report_values() {
    let out = run(&small("compare", r#", "g": 4, "c": 1, "delta": 0.2"#), Execution::Sequential).unwrap();
    let r = &out.report;
    assert!((r.closed_form["revenue_batch"].as_f64().unwrap() - 0.8 / 3.0).abs() < 1e-12);
    for flag in ["boost_allocates_better", "boost_welfare_better", "boost_revenue_better"] {
        assert_eq!(r.flags[flag], true);
    }
    for key in ["batch_revenue", "boost_revenue", "boost_payment_slow"] {
        assert_eq!(r.monte_carlo[key].n, 200);
    }
    let json: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
    for key in ["config_echo", "closed_form", "monte_carlo", "audits", "flags", "warnings"] {
        assert!(json.get(key).is_some(), "{key}");
    }
}

#[test]
fn exit_status_contract() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    let csv = dir.path().join("s.csv");
    let args = |extra: &[&str]| {
        let mut v = vec!["seqmech".to_string()];
        v.extend(extra.iter().map(|s| s.to_string()));
        v.extend(["--json".into(), json.display().to_string(), "--csv".into(), csv.display().to_string()]);
        v
    };
    assert_eq!(main_with(args(&["compare", "--g", "4", "--c", "1", "--delta", "0.2", "--n", "100"])), 0);
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(report["config_echo"]["mc"]["n"], 100);
    assert!(fs::read_to_string(&csv).unwrap().starts_with("delta,g,c,u,"));

    assert_eq!(main_with(args(&["compare", "--g", "1", "--c", "2", "--delta", "0.2"])), EXIT_ERROR);
    assert_eq!(main_with(args(&["boost", "--g", "1", "--c", "1", "--delta", "0.25", "--n", "100"])), 0);
    assert_eq!(
        main_with(args(&["boost", "--g", "1", "--c", "1", "--delta", "0.25", "--n", "100", "--pricing", "first-price"])),
        EXIT_CHECK_FAILED
    );
    assert_eq!(main_with(args(&["latency", "--cost-c", "0.5"])), EXIT_ERROR);
    assert_eq!(main_with(args(&["nonsense"])), EXIT_ERROR);
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    let out = dir.path().join("r.json");
    fs::write(&cfg, r#"{"command": "compare", "g": 4, "c": 1, "delta": 0.2, "mc": {"n": 50, "seed": 9}}"#).unwrap();
    let status = main_with([
        "seqmech",
        "compare",
        "--config",
        cfg.to_str().unwrap(),
        "--delta",
        "0.1",
        "--threads",
        "2",
        "--json",
        out.to_str().unwrap(),
    ]);
    assert_eq!(status, 0);
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["config_echo"]["delta"], 0.1);
    assert_eq!(report["config_echo"]["mc"]["seed"], 9);
    assert!(report["config_echo"].get("threads").is_none());
    // The echoed config parses back to the run's config.
    let echo = parse_config(&report["config_echo"].to_string()).unwrap();
    assert_eq!(echo.command, Command::Compare);
    assert_eq!(echo.delta, Some(0.1));
}

#[test]
fn config_errors_name_key_and_constraint() {
    let err = |t: &str| parse_config(t).unwrap_err().to_string();
    assert_eq!(err(r#"{"command": "compare", "g": 1, "c": 2, "delta": 0.2}"#), "boost params: require g ≥ c");
    assert_eq!(err(r#"{"command": "compare", "g": 4, "c": 1}"#), "config: delta: compare needs delta or grids.deltas");
    assert_eq!(
        err(r#"{"command": "batch", "grids": {"taus": [1.5]}}"#),
        "config: grids.taus: 1.5 is outside [0, 1]"
    );
    assert!(err(r#"{"command": "batch", "curve": {"kind": "deterministic", "delay": 0}}"#).contains("inclusion curve"));
    assert!(err("not json").starts_with("config: document:"));
}
