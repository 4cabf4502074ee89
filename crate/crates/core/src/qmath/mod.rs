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

//! Dense complex linear algebra over tensor-factored registers.
//!
//! Tensor order is fixed crate-wide: subsystem 0 is the most significant
//! factor of every basis index, so the "first" qubits of a register are
//! always subsystems `0..s`.

pub mod cap;
pub mod dump;
pub mod haar;
pub mod layout;
pub mod linalg;
pub mod measure;
pub mod operator;
pub mod seed;
pub mod state;
pub mod symmetric;

pub use cap::{check_operator_dim, check_state_dim, operator_cap_qubits};
pub use haar::{gaussian_hermitian_with, haar_state, haar_state_with, haar_unitary, haar_unitary_with};
pub use layout::{partial_trace, RegisterLayout};
pub use linalg::{kron, trace_norm, trace_norm_matrix, CMatrix, CVector};
pub use measure::lueders_update;
pub use operator::{DensityMatrix, HermitianOp};
pub use state::StateVector;
pub use symmetric::{antisym_projector_pair, max_entangled, permutation_operator, sym_projector};

/// Tolerance for structural invariants (hermiticity, normalization, PSD floor).
pub const STRUCT_TOL: f64 = 1e-9;

/// Tolerance for oracle equivalence on analytically exact quantities.
pub const ORACLE_TOL: f64 = 1e-12;
