// Copyright 2026 The chrs-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

use std::process::Command;

use chrs_cli::{run_experiment, Config, ExperimentReport};
use chrs_core::qmath::dump::read_dump;

fn chrs(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_chrs")).args(args).output().unwrap()
}

#[test]
fn harrow_report_passes() {
    let out = chrs(&["harrow", "--d", "4", "--r", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let rep: ExperimentReport = serde_json::from_slice(&out.stdout).unwrap();
    let b = &rep.bounds["harrow"];
    assert_eq!(b.theorem, "Lem4.2");
    assert_eq!(b.pass, Some(true));
    assert!((b.lhs - 15.0 / 68.0).abs() < 1e-12);
}

#[test]
fn config_file_run_with_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.cfg");
    let json = dir.path().join("r.json");
    let csv = dir.path().join("r.csv");
    let dump = dir.path().join("rho.bin");
    std::fs::write(
        &cfg,
        format!("# small gap\nexperiment = prs-gap\nm = 2\nr = 2\ndump = {}\n", dump.display()),
    )
    .unwrap();
    let out = chrs(&[
        "run",
        cfg.to_str().unwrap(),
        "--out",
        json.to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rep: ExperimentReport = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(rep.bounds["prs_gap"].theorem, "Thm4.5");
    assert!((rep.metrics["lhs_distance"].value - 0.3).abs() < 1e-12);
    assert_eq!(rep.config_echo["s"], "1");
    let rows = std::fs::read_to_string(&csv).unwrap().lines().count();
    assert_eq!(rows, 1 + rep.metrics.len() + rep.bounds.len());
    let m = read_dump(&dump).unwrap();
    assert_eq!(m.nrows(), 16);
    assert_eq!(rep.artifact_paths, vec![dump.display().to_string()]);
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "experiment = prs-gap\nwidth = 3\n").unwrap();
    let out = chrs(&["run", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("width"));

    let out = chrs(&["run", dir.path().join("missing.cfg").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let out = chrs(&["prs-gap", "--m", "7", "--r", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap of 13"));

    assert_eq!(chrs(&["prs-gap", "--mode", "fast"]).status.code(), Some(2));
    assert_eq!(chrs(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(chrs(&["stretch", "--dump", "/tmp/x"]).status.code(), Some(2));
}

#[test]
fn failing_bound_exits_one() {
    // two samples cannot get within 0.05 of the exact moment
    let out = chrs(&["moments", "--d", "4", "--r", "2", "--samples", "2"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn reports_are_reproducible() {
    let cfg = Config::parse_str("experiment = attack\nm = 2\ntrials = 20\nseed = 5\n").unwrap();
    let a = run_experiment(&cfg).unwrap();
    let b = run_experiment(&cfg).unwrap();
    assert_eq!(a.fingerprint(), b.fingerprint());
    let echo: String = a.config_echo.iter().map(|(k, v)| format!("{k} = {v}\n")).collect();
    let back = Config::parse_str(&echo).unwrap().resolve().unwrap();
    assert_eq!(back, cfg.resolve().unwrap());
}

#[test]
fn custom_strategy_from_dump() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sender.bin");
    // block of (R, C) at lambda = 2, s = 1 is four qubits
    let rho = chrs_core::qmath::DensityMatrix::maximally_mixed(16);
    chrs_core::qmath::dump::write_dump(&path, rho.matrix()).unwrap();
    let cfg = Config::parse_str(&format!(
        "experiment = commit-binding\nstrategy = custom\nstate = {}\n",
        path.display()
    ))
    .unwrap();
    let rep = run_experiment(&cfg).unwrap();
    assert!(rep.metrics["p0"].value + rep.metrics["p1"].value <= 2.0);
    assert!(rep.bounds.is_empty());
}
