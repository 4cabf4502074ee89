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

//! Flat `key = value` experiment configuration.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use chrs_core::qmath::operator_cap_qubits;
use chrs_core::Mode;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Moments,
    Harrow,
    PrsGap,
    Stretch,
    Split,
    Blocknorm,
    CommitHiding,
    CommitBinding,
    CommitExtractor,
    Attack,
    Concentration,
}

impl Experiment {
    pub const ALL: [Experiment; 11] = [
        Experiment::Moments,
        Experiment::Harrow,
        Experiment::PrsGap,
        Experiment::Stretch,
        Experiment::Split,
        Experiment::Blocknorm,
        Experiment::CommitHiding,
        Experiment::CommitBinding,
        Experiment::CommitExtractor,
        Experiment::Attack,
        Experiment::Concentration,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Experiment::Moments => "moments",
            Experiment::Harrow => "harrow",
            Experiment::PrsGap => "prs-gap",
            Experiment::Stretch => "stretch",
            Experiment::Split => "split",
            Experiment::Blocknorm => "blocknorm",
            Experiment::CommitHiding => "commit-hiding",
            Experiment::CommitBinding => "commit-binding",
            Experiment::CommitExtractor => "commit-extractor",
            Experiment::Attack => "attack",
            Experiment::Concentration => "concentration",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Experiment {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| CliError::Config(format!("unknown experiment `{s}`")))
    }
}

/// Commit-phase behaviour for the binding and extractor experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyName {
    HonestFlip,
    HonestOne,
    Superposition,
    Custom,
}

impl StrategyName {
    pub fn as_str(self) -> &'static str {
        match self {
            StrategyName::HonestFlip => "honest-flip",
            StrategyName::HonestOne => "honest-one",
            StrategyName::Superposition => "superposition",
            StrategyName::Custom => "custom",
        }
    }
}

impl FromStr for StrategyName {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "honest-flip" => Ok(StrategyName::HonestFlip),
            "honest-one" => Ok(StrategyName::HonestOne),
            "superposition" => Ok(StrategyName::Superposition),
            "custom" => Ok(StrategyName::Custom),
            _ => Err(CliError::Config(format!("unknown strategy `{s}`"))),
        }
    }
}

/// Keys accepted in a configuration file, in echo order.
pub const KEYS: [&str; 21] = [
    "experiment", "m", "n", "s", "r", "d", "c", "ell", "t", "lambda", "bit", "strategy", "state",
    "eps", "mode", "samples", "trials", "seed", "order_seed", "dump", "out",
];

/// An experiment description. Fields left `None` do not apply to the
/// experiment (after [`Config::resolve`]) or were not given (before).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Config {
    pub experiment: Experiment,
    pub m: Option<usize>,
    pub n: Option<usize>,
    pub s: Option<usize>,
    pub r: Option<usize>,
    pub d: Option<usize>,
    pub c: Option<usize>,
    pub ell: Option<usize>,
    pub t: Option<usize>,
    pub lambda: Option<usize>,
    pub bit: Option<u8>,
    pub strategy: Option<StrategyName>,
    /// Density-matrix dump for the custom strategy.
    pub state: Option<String>,
    pub eps: Option<f64>,
    pub mode: Option<Mode>,
    pub samples: Option<usize>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub order_seed: Option<u64>,
    pub dump: Option<String>,
    pub out: Option<String>,
}

fn parse_value<T: FromStr>(key: &str, v: &str) -> Result<T, CliError> {
    v.parse()
        .map_err(|_| CliError::Config(format!("invalid value `{v}` for `{key}`")))
}

impl Config {
    pub fn new(experiment: Experiment) -> Self {
        Config {
            experiment,
            m: None,
            n: None,
            s: None,
            r: None,
            d: None,
            c: None,
            ell: None,
            t: None,
            lambda: None,
            bit: None,
            strategy: None,
            state: None,
            eps: None,
            mode: None,
            samples: None,
            trials: None,
            seed: None,
            order_seed: None,
            dump: None,
            out: None,
        }
    }

    fn set(&mut self, key: &str, v: &str) -> Result<(), CliError> {
        match key {
            "experiment" => self.experiment = v.parse()?,
            "m" => self.m = Some(parse_value(key, v)?),
            "n" => self.n = Some(parse_value(key, v)?),
            "s" => self.s = Some(parse_value(key, v)?),
            "r" => self.r = Some(parse_value(key, v)?),
            "d" => self.d = Some(parse_value(key, v)?),
            "c" => self.c = Some(parse_value(key, v)?),
            "ell" => self.ell = Some(parse_value(key, v)?),
            "t" => self.t = Some(parse_value(key, v)?),
            "lambda" => self.lambda = Some(parse_value(key, v)?),
            "bit" => self.bit = Some(parse_value(key, v)?),
            "strategy" => self.strategy = Some(v.parse()?),
            "state" => self.state = Some(v.to_string()),
            "eps" => self.eps = Some(parse_value(key, v)?),
            "mode" => {
                self.mode = Some(v.parse().map_err(|_| CliError::Config(format!("invalid mode `{v}`")))?)
            }
            "samples" => self.samples = Some(parse_value(key, v)?),
            "trials" => self.trials = Some(parse_value(key, v)?),
            "seed" => self.seed = Some(parse_value(key, v)?),
            "order_seed" => self.order_seed = Some(parse_value(key, v)?),
            "dump" => self.dump = Some(v.to_string()),
            "out" => self.out = Some(v.to_string()),
            _ => return Err(CliError::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Parses configuration text. Every line is `key = value`, blank, or a
    /// `#` comment; `experiment` is mandatory and keys may not repeat.
    pub fn parse_str(text: &str) -> Result<Config, CliError> {
        let mut pairs: BTreeMap<String, (usize, String)> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected `key = value`", i + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            if !KEYS.contains(&k) {
                return Err(CliError::Config(format!("line {}: unknown key `{k}`", i + 1)));
            }
            if pairs.insert(k.to_string(), (i + 1, v.to_string())).is_some() {
                return Err(CliError::Config(format!("line {}: duplicate key `{k}`", i + 1)));
            }
        }
        let (_, exp) = pairs
            .remove("experiment")
            .ok_or_else(|| CliError::Config("missing `experiment` key".into()))?;
        let mut cfg = Config::new(exp.parse()?);
        for (k, (line, v)) in &pairs {
            cfg.set(k, v)
                .map_err(|e| CliError::Config(format!("line {line}: {}", e.message())))?;
        }
        Ok(cfg)
    }

    pub fn parse_file(path: impl AsRef<Path>) -> Result<Config, CliError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Config::parse_str(&text)
    }

    /// Set keys and their textual values, in [`KEYS`] order.
    pub fn pairs(&self) -> Vec<(&'static str, String)> {
        fn opt<T: ToString>(v: &Option<T>) -> Option<String> {
            v.as_ref().map(ToString::to_string)
        }
        let vals = [
            Some(self.experiment.to_string()),
            opt(&self.m),
            opt(&self.n),
            opt(&self.s),
            opt(&self.r),
            opt(&self.d),
            opt(&self.c),
            opt(&self.ell),
            opt(&self.t),
            opt(&self.lambda),
            opt(&self.bit),
            self.strategy.map(|s| s.as_str().to_string()),
            self.state.clone(),
            opt(&self.eps),
            self.mode.map(|m| m.as_str().to_string()),
            opt(&self.samples),
            opt(&self.trials),
            opt(&self.seed),
            opt(&self.order_seed),
            self.dump.clone(),
            self.out.clone(),
        ];
        KEYS.iter()
            .zip(vals)
            .filter_map(|(k, v)| v.map(|v| (*k, v)))
            .collect()
    }

    pub fn to_text(&self) -> String {
        self.pairs()
            .into_iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }

    /// Fills experiment defaults, drops keys the experiment does not use and
    /// pre-checks size caps. Idempotent.
    pub fn resolve(&self) -> Result<Config, CliError> {
        use Experiment::*;
        let mut out = Config::new(self.experiment);
        out.seed = Some(self.seed.unwrap_or(0));
        out.dump = self.dump.clone();
        out.out = self.out.clone();
        let used: &[&str] = match self.experiment {
            Moments => {
                out.d = Some(self.dim_or(4)?);
                out.r = Some(self.r.unwrap_or(2));
                out.mode = Some(self.mode.unwrap_or(Mode::MonteCarlo));
                out.samples = Some(self.samples.unwrap_or(10_000));
                check_joint_dim(out.d.unwrap(), out.r.unwrap())?;
                &["m", "d", "r", "mode", "samples"]
            }
            Harrow => {
                out.d = Some(self.dim_or(4)?);
                out.r = Some(self.r.unwrap_or(2));
                out.mode = Some(self.mode.unwrap_or(Mode::Exact));
                out.samples = Some(self.samples.unwrap_or(10_000));
                check_joint_dim(out.d.unwrap(), 2 * out.r.unwrap())?;
                &["m", "d", "r", "mode", "samples"]
            }
            PrsGap => {
                let m = self.m.unwrap_or(4);
                let s = self.pad_width(m / 2)?;
                out.m = Some(m);
                out.s = Some(s);
                out.n = Some(2 * s);
                out.r = Some(self.r.unwrap_or(1));
                out.mode = Some(self.mode.unwrap_or(Mode::Exact));
                out.samples = Some(self.samples.unwrap_or(10_000));
                check_joint_qubits(m * out.r.unwrap())?;
                &["m", "n", "s", "r", "mode", "samples"]
            }
            Stretch => {
                out.m = Some(self.m.unwrap_or(3));
                out.r = Some(self.r.unwrap_or(1));
                out.mode = Some(self.mode.unwrap_or(Mode::Exact));
                out.samples = Some(self.samples.unwrap_or(10_000));
                check_joint_qubits(out.m.unwrap() * out.r.unwrap())?;
                &["m", "r", "mode", "samples"]
            }
            Split => {
                out.m = Some(self.m.unwrap_or(3));
                out.r = Some(self.r.unwrap_or(1));
                out.samples = Some(self.samples.unwrap_or(10_000));
                check_joint_qubits(out.m.unwrap() * out.r.unwrap())?;
                &["m", "r", "samples"]
            }
            Blocknorm => {
                out.m = Some(self.m.unwrap_or(2));
                out.trials = Some(self.trials.unwrap_or(1000));
                check_joint_qubits(out.m.unwrap())?;
                &["m", "trials"]
            }
            CommitHiding => {
                let lambda = self.lambda.unwrap_or(4);
                out.lambda = Some(lambda);
                out.s = Some(self.pad_width(lambda / 2)?);
                out.t = Some(self.t.unwrap_or(1));
                out.c = Some(self.c.unwrap_or(1));
                check_joint_qubits(lambda * (out.t.unwrap() + 1))?;
                &["lambda", "n", "s", "t", "c"]
            }
            CommitBinding | CommitExtractor => {
                out.lambda = Some(self.lambda.unwrap_or(2));
                out.s = Some(self.pad_width(1)?);
                out.c = Some(self.c.unwrap_or(1));
                out.strategy = Some(self.strategy.unwrap_or(StrategyName::HonestFlip));
                if out.strategy == Some(StrategyName::Custom) {
                    out.state = Some(
                        self.state
                            .clone()
                            .ok_or_else(|| CliError::Config("custom strategy needs `state`".into()))?,
                    );
                }
                if self.experiment == CommitExtractor {
                    let bit = self.bit.unwrap_or(0);
                    if bit > 1 {
                        return Err(CliError::Config(format!("bit must be 0 or 1, got {bit}")));
                    }
                    out.bit = Some(bit);
                    &["lambda", "n", "s", "c", "strategy", "state", "bit"]
                } else {
                    &["lambda", "n", "s", "c", "strategy", "state"]
                }
            }
            Attack => {
                out.m = Some(self.m.unwrap_or(3));
                out.n = Some(self.n.unwrap_or(2));
                out.c = Some(self.c.unwrap_or(2));
                out.ell = Some(self.ell.unwrap_or(8));
                out.trials = Some(self.trials.unwrap_or(200));
                out.order_seed = Some(self.order_seed.unwrap_or(0));
                check_joint_qubits_state(2 * out.c.unwrap() * out.m.unwrap())?;
                &["m", "n", "c", "ell", "trials", "order_seed"]
            }
            Concentration => {
                out.d = Some(self.d.unwrap_or(16));
                out.m = Some(self.m.unwrap_or(8));
                out.samples = Some(self.samples.unwrap_or(100_000));
                &["d", "m", "samples"]
            }
        };
        if self.experiment == Blocknorm {
            out.eps = self.eps;
        } else if self.eps.is_some() {
            return Err(self.unused("eps"));
        }
        for (k, _) in self.pairs() {
            let common = ["experiment", "seed", "dump", "out", "eps"];
            if !common.contains(&k) && !used.contains(&k) {
                return Err(self.unused(k));
            }
        }
        Ok(out)
    }

    fn unused(&self, key: &str) -> CliError {
        CliError::Config(format!("key `{key}` does not apply to experiment `{}`", self.experiment))
    }

    /// `d`, or `2^m` when only `m` is given.
    fn dim_or(&self, default: usize) -> Result<usize, CliError> {
        match (self.d, self.m) {
            (Some(d), Some(m)) if Some(d) != 1usize.checked_shl(m as u32) => {
                Err(CliError::Config(format!("d = {d} disagrees with m = {m}")))
            }
            (Some(d), _) => Ok(d),
            (None, Some(m)) if m < 31 => Ok(1 << m),
            (None, Some(m)) => Err(CliError::Config(format!("m = {m} is too large"))),
            (None, None) => Ok(default),
        }
    }

    /// `s`, or `n / 2` when only the key length is given.
    fn pad_width(&self, default: usize) -> Result<usize, CliError> {
        match (self.s, self.n) {
            (_, Some(n)) if n % 2 == 1 => Err(CliError::Config(format!("key length n = {n} must be even"))),
            (Some(s), Some(n)) if n != 2 * s => {
                Err(CliError::Config(format!("n = {n} disagrees with s = {s}")))
            }
            (Some(s), _) => Ok(s),
            (None, Some(n)) => Ok(n / 2),
            (None, None) => Ok(default),
        }
    }
}

fn check_joint_qubits(q: usize) -> Result<(), CliError> {
    let cap = operator_cap_qubits() as usize;
    if q > cap {
        return Err(CliError::Config(format!(
            "joint system of {q} qubits exceeds the cap of {cap} qubits (CHRS_CAP_QUBITS)"
        )));
    }
    Ok(())
}

fn check_joint_qubits_state(q: usize) -> Result<(), CliError> {
    let cap = 2 * operator_cap_qubits() as usize;
    if q > cap {
        return Err(CliError::Config(format!(
            "joint state of {q} qubits exceeds the cap of {cap} qubits (CHRS_CAP_QUBITS)"
        )));
    }
    Ok(())
}

fn check_joint_dim(d: usize, copies: usize) -> Result<(), CliError> {
    let cap = operator_cap_qubits();
    let dim = (0..copies).try_fold(1u128, |acc, _| acc.checked_mul(d as u128));
    match dim {
        Some(v) if v <= 1u128 << cap => Ok(()),
        _ => Err(CliError::Config(format!(
            "{d}^{copies} exceeds the cap of 2^{cap} (CHRS_CAP_QUBITS)"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_prs_config_resolves_defaults() {
        let cfg = Config::parse_str("experiment = prs-gap\nm = 4\nr = 1\n").unwrap().resolve().unwrap();
        assert_eq!(cfg.s, Some(2));
        assert_eq!(cfg.n, Some(4));
        assert_eq!(cfg.mode, Some(Mode::Exact));
        assert_eq!(cfg.seed, Some(0));
    }

    #[test]
    fn echo_round_trips() {
        for e in Experiment::ALL {
            let cfg = Config::new(e).resolve().unwrap();
            let back = Config::parse_str(&cfg.to_text()).unwrap();
            assert_eq!(back, cfg);
            assert_eq!(back.resolve().unwrap(), cfg);
        }
    }

    #[test]
    fn comments_and_blank_lines() {
        let cfg = Config::parse_str("# header\n\nexperiment = harrow # trailing\n  d = 2\n").unwrap();
        assert_eq!(cfg.experiment, Experiment::Harrow);
        assert_eq!(cfg.d, Some(2));
    }

    #[test]
    fn rejections() {
        assert!(Config::parse_str("experiment = prs-gap\nfoo = 1\n").is_err());
        assert!(Config::parse_str("experiment = prs-gap\nm = 1\nm = 2\n").is_err());
        assert!(Config::parse_str("m = 2\n").is_err());
        assert!(Config::parse_str("experiment = nope\n").is_err());
        assert!(Config::parse_str("experiment = prs-gap\nm = x\n").is_err());
        assert!(Config::parse_str("experiment = prs-gap\nn = 3\n").unwrap().resolve().is_err());
        assert!(Config::parse_str("experiment = prs-gap\nell = 3\n").unwrap().resolve().is_err());
    }

    #[test]
    fn cap_violation_names_cap() {
        let err = Config::parse_str("experiment = prs-gap\nm = 7\nr = 2\n").unwrap().resolve().unwrap_err();
        let cap = operator_cap_qubits().to_string();
        assert!(err.message().contains(&cap), "{}", err.message());
    }
}
