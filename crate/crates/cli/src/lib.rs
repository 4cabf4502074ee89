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

//! Experiment runner for the chrs-core laboratory.
//!
//! An experiment is described by a flat [`Config`], resolved against
//! per-experiment defaults and executed by [`run_experiment`] into an
//! [`ExperimentReport`].

pub mod config;
pub mod experiments;
pub mod report;

pub use config::{Config, Experiment, StrategyName};
pub use experiments::run_experiment;
pub use report::{BoundEntry, ExperimentReport, Metric};

/// Exit code when every applicable bound passes.
pub const EXIT_PASS: i32 = 0;
/// Exit code when an applicable bound fails.
pub const EXIT_FAIL: i32 = 1;
/// Exit code for configuration and usage errors.
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numeric error: {0}")]
    Numeric(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Numeric(m) | CliError::Io(m) => m,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numeric(_) => EXIT_FAIL,
            CliError::Config(_) | CliError::Io(_) => EXIT_CONFIG,
        }
    }
}

impl From<chrs_core::Error> for CliError {
    fn from(e: chrs_core::Error) -> Self {
        use chrs_core::Error;
        match e {
            Error::Config(m) | Error::Unsupported(m) => CliError::Config(m),
            Error::Numeric(m) => CliError::Numeric(m),
            Error::Io(m) => CliError::Io(m),
        }
    }
}
