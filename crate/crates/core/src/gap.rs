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

//! Two-sided inequality reports shared by every verification experiment.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Bounds above this value say nothing about a trace distance.
pub const VACUOUS_ABOVE: f64 = 2.0;

/// How an ensemble average is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Closed-form symmetric-subspace moments.
    Exact,
    /// Seeded Monte Carlo sampling.
    #[serde(rename = "mc")]
    MonteCarlo,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::MonteCarlo => "mc",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "exact" => Ok(Mode::Exact),
            "mc" | "monte-carlo" => Ok(Mode::MonteCarlo),
            other => Err(Error::Config(format!("unknown mode `{other}` (expected exact or mc)"))),
        }
    }
}

/// A computed distance against a reference bound.
///
/// `pass` is the raw comparison `lhs_distance <= bound_value + 3 * mc_error`.
/// `applicable` is false when the bound's hypotheses fail or the bound is
/// vacuous; callers should only count `pass` when `applicable` holds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub lhs_distance: f64,
    pub bound_value: f64,
    pub bound_id: String,
    pub pass: bool,
    pub applicable: bool,
    pub mode: Mode,
    pub mc_error: Option<f64>,
}

impl GapReport {
    pub fn new(
        lhs_distance: f64,
        bound_value: f64,
        bound_id: impl Into<String>,
        applicable: bool,
        mode: Mode,
        mc_error: Option<f64>,
    ) -> Self {
        let allowance = 3.0 * mc_error.unwrap_or(0.0);
        Self {
            lhs_distance,
            bound_value,
            bound_id: bound_id.into(),
            pass: lhs_distance <= bound_value + allowance,
            applicable: applicable && bound_value <= VACUOUS_ABOVE,
            mode,
            mc_error,
        }
    }

    /// `bound + 3 * mc_error - lhs`; non-negative exactly when `pass`.
    pub fn margin(&self) -> f64 {
        self.bound_value + 3.0 * self.mc_error.unwrap_or(0.0) - self.lhs_distance
    }

    /// Whether the report is a pass that actually says something.
    pub fn verified(&self) -> bool {
        self.applicable && self.pass
    }
}
