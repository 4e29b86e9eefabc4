#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

use hashpeak_core::dynamics::simulate;
use hashpeak_core::econ::MiningParams;
use hashpeak_core::exog_series::{write_csv, ExogenousSeries, Unit};
use hashpeak_core::fixtures;

/// Model hash rate sampled weekly (plus the last day), as a historical series.
pub fn synthetic_hash_rate(params: &MiningParams, t_end: f64) -> ExogenousSeries {
    let traj = simulate(params, &fixtures::price(), &fixtures::fees(), t_end).unwrap();
    let mut points: Vec<(f64, f64)> = traj
        .records
        .iter()
        .filter(|r| r.t % 7.0 == 0.0)
        .map(|r| (r.t, r.hash_rate_ghs))
        .collect();
    if points.last().map(|p| p.0) != Some(t_end) {
        points.push((t_end, traj.hash_rate_at(t_end).unwrap()));
    }
    ExogenousSeries::new("synthetic-hash-rate", Unit::GhPerSecond, points).unwrap()
}

pub fn write_synthetic(params: &MiningParams, path: &Path) {
    write_csv(&synthetic_hash_rate(params, 4100.0), path).unwrap();
}

pub fn hashpeak(args: &[&str]) -> Output {
    hashpeak_env(args, &[])
}

pub fn hashpeak_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hashpeak"));
    cmd.args(args);
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("run hashpeak")
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}
