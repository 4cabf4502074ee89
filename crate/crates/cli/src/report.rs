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

//! Experiment reports and their JSON/CSV serialization.

use std::collections::BTreeMap;
use std::fs::File;
use std::path::Path;

use chrs_core::GapReport;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metric {
    pub value: f64,
    pub stderr: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundEntry {
    /// Tag of the statement the bound comes from.
    pub theorem: String,
    /// Measured left-hand side.
    pub lhs: f64,
    pub value: f64,
    pub applicable: bool,
    /// `None` when the bound is not applicable.
    pub pass: Option<bool>,
}

impl BoundEntry {
    pub fn new(theorem: &str, lhs: f64, value: f64, applicable: bool, pass: bool) -> Self {
        BoundEntry {
            theorem: theorem.to_string(),
            lhs,
            value,
            applicable,
            pass: applicable.then_some(pass),
        }
    }

    pub fn from_gap(g: &GapReport) -> Self {
        BoundEntry::new(&g.bound_id, g.lhs_distance, g.bound_value, g.applicable, g.pass)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment_id: String,
    pub config_echo: BTreeMap<String, String>,
    pub seeds: Vec<u64>,
    pub metrics: BTreeMap<String, Metric>,
    pub bounds: BTreeMap<String, BoundEntry>,
    pub wall_time_ms: u64,
    pub artifact_paths: Vec<String>,
}

impl ExperimentReport {
    pub fn new(experiment_id: impl Into<String>) -> Self {
        ExperimentReport {
            experiment_id: experiment_id.into(),
            config_echo: BTreeMap::new(),
            seeds: Vec::new(),
            metrics: BTreeMap::new(),
            bounds: BTreeMap::new(),
            wall_time_ms: 0,
            artifact_paths: Vec::new(),
        }
    }

    pub fn metric(&mut self, name: &str, value: f64) {
        self.metrics.insert(name.to_string(), Metric { value, stderr: None });
    }

    pub fn metric_err(&mut self, name: &str, value: f64, stderr: f64) {
        self.metrics.insert(name.to_string(), Metric { value, stderr: Some(stderr) });
    }

    pub fn bound(&mut self, name: &str, entry: BoundEntry) {
        self.bounds.insert(name.to_string(), entry);
    }

    /// Whether every applicable bound passes.
    pub fn all_pass(&self) -> bool {
        self.bounds.values().all(|b| b.pass != Some(false))
    }

    pub fn exit_code(&self) -> i32 {
        if self.all_pass() {
            0
        } else {
            1
        }
    }

    /// JSON of everything except the wall time.
    pub fn fingerprint(&self) -> String {
        let mut r = self.clone();
        r.wall_time_ms = 0;
        serde_json::to_string(&r).expect("report serializes")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<(), CliError> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json() + "\n")
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
    }

    /// One row per metric and per bound.
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<(), CliError> {
        let mut out = csv::Writer::from_writer(w);
        let io = |e: csv::Error| CliError::Io(e.to_string());
        out.write_record(["experiment_id", "name", "value", "stderr", "bound", "applicable", "pass"])
            .map_err(io)?;
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for (name, m) in &self.metrics {
            out.write_record([&self.experiment_id, name, &m.value.to_string(), &opt(m.stderr), "", "", ""])
                .map_err(io)?;
        }
        for (name, b) in &self.bounds {
            let pass = b.pass.map(|p| p.to_string()).unwrap_or_default();
            out.write_record([
                &self.experiment_id,
                name,
                &b.lhs.to_string(),
                "",
                &b.value.to_string(),
                &b.applicable.to_string(),
                &pass,
            ])
            .map_err(io)?;
        }
        out.flush().map_err(|e| CliError::Io(e.to_string()))
    }

    pub fn write_csv_file(&self, path: impl AsRef<Path>) -> Result<(), CliError> {
        let path = path.as_ref();
        let f = File::create(path).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
        self.write_csv(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ExperimentReport {
        let mut r = ExperimentReport::new("x");
        r.metric("a", 0.5);
        r.metric_err("b", 0.25, 0.01);
        r.bound("g", BoundEntry::new("T", 0.1, 1.0, true, true));
        r.bound("h", BoundEntry::new("T", 3.0, 2.5, false, false));
        r
    }

    #[test]
    fn json_round_trip() {
        let r = sample();
        let back: ExperimentReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn csv_rows() {
        let mut buf = Vec::new();
        sample().write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1 + 2 + 2);
        let mut buf = Vec::new();
        ExperimentReport::new("e").write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 1);
    }

    #[test]
    fn inapplicable_bounds_do_not_fail() {
        let r = sample();
        assert_eq!(r.bounds["h"].pass, None);
        assert_eq!(r.exit_code(), 0);
        let mut r = r;
        r.bound("f", BoundEntry::new("T", 3.0, 1.0, true, false));
        assert_eq!(r.exit_code(), 1);
    }
}
