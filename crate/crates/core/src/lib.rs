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

//! Numerical laboratory for single-copy pseudorandom quantum states in the
//! common Haar random state model.
//!
//! The crate is organised bottom-up:
//!
//! * [`qmath`]: dense complex linear algebra over tensor-factored registers,
//!   Haar sampling, symmetric-subspace projectors and Lüders updates.
//! * [`moments`]: exact and Monte Carlo ensemble averages.
//! * [`prs`]: the partial one-time-pad constructions and the gap checks built
//!   on them.
//! * [`commitment`]: the swap-test bit commitment and its hiding and binding
//!   experiments.
//! * [`attack`]: the multi-copy distinguisher and concentration statistics.
//!
//! Every randomized routine is a pure function of its parameters and a 64-bit
//! seed.

pub mod attack;
pub mod commitment;
pub mod error;
pub mod gap;
pub mod moments;
pub mod prs;
pub mod qmath;

pub use error::{Error, Result};
pub use gap::{GapReport, Mode};
