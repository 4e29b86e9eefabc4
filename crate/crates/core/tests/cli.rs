mod common;

use std::fs;

use common::{hashpeak, stderr, stdout, write_synthetic};
use hashpeak_core::econ::MiningParams;
use serde_json::Value;

fn read_json(path: &std::path::Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn data_rows(path: &std::path::Path) -> usize {
    fs::read_to_string(path).unwrap().lines().count() - 1
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(hashpeak(&["--help"]).status.code(), Some(0));
    let v = hashpeak(&["--version"]);
    assert_eq!(v.status.code(), Some(0));
    assert!(stdout(&v).contains(env!("CARGO_PKG_VERSION")));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(hashpeak(&[]).status.code(), Some(1));
    assert_eq!(hashpeak(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(
        hashpeak(&["simulate", "--dt", "abc"]).status.code(),
        Some(1)
    );
    let o = hashpeak(&["calibrate", "--mode", "three-regime"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("three-regime"));
    assert_eq!(
        hashpeak(&["calibrate", "--window", "0-4100"]).status.code(),
        Some(1)
    );
}

#[test]
fn simulate_default_writes_trajectory_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = hashpeak(&["simulate", "--out", out]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = dir.path().join("trajectory.csv");
    assert_eq!(data_rows(&csv), 4101);
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with(
        "t,height,circulating,subsidy,price,fees,revenues_usd,cost_usd,profit_usd,shortfall_ghs,hash_rate_ghs,tau_days\n"
    ));
    assert!(text.lines().last().unwrap().starts_with("4100,590400,"));

    let manifest = read_json(&dir.path().join("run.json"));
    assert_eq!(manifest["command"], "simulate");
    assert_eq!(manifest["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(manifest["config"]["params"]["dt"], 1.0);
    assert_eq!(manifest["config"]["t_end"], 4100.0);
}

#[test]
fn simulate_half_day_step() {
    let dir = tempfile::tempdir().unwrap();
    let o = hashpeak(&[
        "simulate",
        "--dt",
        "0.5",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(data_rows(&dir.path().join("trajectory.csv")), 8201);
}

#[test]
fn simulate_missing_fees_file() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("no-such-fees.csv");
    let o = hashpeak(&[
        "simulate",
        "--fees-csv",
        missing.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(
        stderr(&o).contains(missing.to_str().unwrap()),
        "{}",
        stderr(&o)
    );
    assert!(!dir.path().join("trajectory.csv").exists());
}

#[test]
fn simulate_rejects_horizon_beyond_data() {
    let dir = tempfile::tempdir().unwrap();
    let o = hashpeak(&[
        "simulate",
        "--t-end",
        "5000",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("5000"));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("config.json");
    let out_a = dir.path().join("a");
    fs::write(
        &cfg,
        serde_json::json!({
            "t_end": 1000.0,
            "params": {"dt": 0.25, "adjustment_regimes": [{"until_day": null, "tau_days": 500.0}]},
            "out_dir": out_a,
        })
        .to_string(),
    )
    .unwrap();
    let o = hashpeak(&["simulate", "--config", cfg.to_str().unwrap(), "--dt", "0.5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(data_rows(&out_a.join("trajectory.csv")), 2001);
    let text = fs::read_to_string(out_a.join("trajectory.csv")).unwrap();
    assert!(text.lines().nth(1).unwrap().ends_with(",500"));

    // the manifest is itself a config that reproduces the run
    let out_b = dir.path().join("b");
    let o = hashpeak(&[
        "simulate",
        "--config",
        out_a.join("run.json").to_str().unwrap(),
        "--out",
        out_b.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(
        fs::read(out_a.join("trajectory.csv")).unwrap(),
        fs::read(out_b.join("trajectory.csv")).unwrap()
    );
}

#[test]
fn bad_config_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("config.json");
    fs::write(&cfg, r#"{"params": {"dt": 100.0}}"#).unwrap();
    let o = hashpeak(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    fs::write(&cfg, "not json").unwrap();
    assert_eq!(
        hashpeak(&["simulate", "--config", cfg.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );
    let o = hashpeak(&[
        "simulate",
        "--config",
        dir.path().join("absent.json").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn simulate_with_tau_flags() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = hashpeak(&["simulate", "--tau", "800", "--out", out]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    assert!(text.lines().skip(1).all(|l| l.ends_with(",800")));

    let o = hashpeak(&[
        "simulate",
        "--tau",
        "1000,200",
        "--break-day",
        "2000",
        "--out",
        out,
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    assert!(text.lines().nth(2000).unwrap().ends_with(",1000"));
    assert!(text.lines().nth(2001).unwrap().ends_with(",200"));
}

#[test]
fn sanity_default() {
    let o = hashpeak(&["sanity"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("height at day 4100: 590400"), "{text}");
    assert!(
        text.contains("circulating at end of era 0 (day 1459): 10504800"),
        "{text}"
    );
    assert!(
        text.contains("supply asymptote: 20999999.97690000"),
        "{text}"
    );
    assert!(!text.contains("FAIL"));
}

#[test]
fn sanity_compares_observed_heights() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("height.csv");
    fs::write(
        &path,
        "date,value\n2009-01-03,0\n2015-01-01,336000\n2020-03-26,622000\n",
    )
    .unwrap();
    let o = hashpeak(&["sanity", "--height-csv", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(
        stdout(&o).contains("observed heights (height): 2 points"),
        "{}",
        stdout(&o)
    );
}

#[test]
fn calibrate_recovers_synthetic_tau() {
    let dir = tempfile::tempdir().unwrap();
    let hist = dir.path().join("hash-rate.csv");
    write_synthetic(&MiningParams::default().with_single_tau(800.0), &hist);
    let o = hashpeak(&[
        "calibrate",
        "--hashrate-csv",
        hist.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report = read_json(&dir.path().join("fit_report.json"));
    assert_eq!(report["mode"], "single");
    let tau = report["taus"][0].as_f64().unwrap();
    assert!((tau / 800.0 - 1.0).abs() < 0.01, "tau = {tau}");
    assert!(report["evaluations"].as_u64().unwrap() > 0);
    assert!(report["comparison"].is_null());
    assert!(dir.path().join("trajectory_single.csv").is_file());
}

#[test]
fn calibrate_two_regime_beats_single_on_bundled_data() {
    let dir = tempfile::tempdir().unwrap();
    let o = hashpeak(&[
        "calibrate",
        "--mode",
        "two-regime",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report = read_json(&dir.path().join("fit_report.json"));
    assert_eq!(report["mode"], "two_regime");
    assert_eq!(report["break_day"], 3777.0);
    assert_eq!(report["taus"].as_array().unwrap().len(), 2);
    let two = report["objective"].as_f64().unwrap();
    let single = report["single"]["objective"].as_f64().unwrap();
    assert!(two < single, "{two} vs {single}");
    assert_eq!(report["comparison"]["meaningful"], true);
    for f in [
        "trajectory_single.csv",
        "trajectory_two_regime.csv",
        "run.json",
    ] {
        assert!(dir.path().join(f).is_file(), "{f}");
    }
    assert_eq!(
        data_rows(&dir.path().join("trajectory_two_regime.csv")),
        4101
    );
}

#[test]
fn calibrate_window_and_objective_flags() {
    let dir = tempfile::tempdir().unwrap();
    let o = hashpeak(&[
        "calibrate",
        "--window",
        "1000:3000",
        "--objective",
        "log-rmse",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report = read_json(&dir.path().join("fit_report.json"));
    assert_eq!(report["objective_kind"], "log_rmse");
    let manifest = read_json(&dir.path().join("run.json"));
    assert_eq!(
        manifest["config"]["calibration"]["fit_window"],
        serde_json::json!([1000.0, 3000.0])
    );
    assert_eq!(data_rows(&dir.path().join("trajectory_single.csv")), 3001);
}

#[test]
fn project_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        let o = hashpeak(&["project", "--seed", "42", "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    for f in ["trajectory.csv", "summary.json"] {
        assert_eq!(
            fs::read(a.join(f)).unwrap(),
            fs::read(b.join(f)).unwrap(),
            "{f}"
        );
    }
    let summary = read_json(&a.join("summary.json"));
    assert_eq!(summary["seed"], 42);
    assert!(summary["generator"].as_str().unwrap().contains("ChaCha8"));
    assert_eq!(summary["halving_days"].as_array().unwrap().len(), 5);
    for key in ["peak_hash_rate", "peak_day", "terminal_hash_rate"] {
        assert!(summary[key].is_number(), "{key}");
    }
    assert_eq!(data_rows(&a.join("trajectory.csv")), 7501);

    let c = dir.path().join("c");
    hashpeak(&["project", "--seed", "43", "--out", c.to_str().unwrap()]);
    assert_ne!(
        fs::read(a.join("trajectory.csv")).unwrap(),
        fs::read(c.join("trajectory.csv")).unwrap()
    );
}

#[test]
fn project_deterministic_relaxes_to_new_equilibrium() {
    let dir = tempfile::tempdir().unwrap();
    let o = hashpeak(&[
        "project",
        "--sd-price",
        "0",
        "--sd-fees",
        "0",
        "--horizon",
        "5800",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let summary = read_json(&dir.path().join("summary.json"));
    let terminal = summary["terminal_hash_rate"].as_f64().unwrap();
    assert!(
        (terminal / 5.66e10 - 1.0).abs() < 0.10,
        "terminal = {terminal:e}"
    );
    assert_eq!(summary["peak_day"], 4375.0);
}

#[test]
fn project_horizon_before_start() {
    let dir = tempfile::tempdir().unwrap();
    let o = hashpeak(&[
        "project",
        "--horizon",
        "4000",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("4000"));
}

#[test]
fn project_mean_flags() {
    let dir = tempfile::tempdir().unwrap();
    let o = hashpeak(&[
        "project",
        "--sd-price",
        "0",
        "--sd-fees",
        "0",
        "--mean-price",
        "20000",
        "--mean-fees",
        "10",
        "--horizon",
        "4200",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    let last: Vec<&str> = text.lines().last().unwrap().split(',').collect();
    assert_eq!(last[0], "4200");
    assert_eq!(last[4], "20000");
    assert_eq!(last[5], "10");
}
