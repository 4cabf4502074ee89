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

use crate::error::{config, Result};

/// Default joint-system cap, in qubits, for dense operators.
pub const DEFAULT_CAP_QUBITS: u32 = 13;

/// Joint-system cap for dense operators. `CHRS_CAP_QUBITS` overrides the
/// default of 13 qubits.
pub fn operator_cap_qubits() -> u32 {
    std::env::var("CHRS_CAP_QUBITS")
        .ok()
        .and_then(|v| v.trim().parse::<u32>().ok())
        .filter(|&q| q > 0 && q < 31)
        .unwrap_or(DEFAULT_CAP_QUBITS)
}

/// Rejects operators of dimension above `2^cap`.
pub fn check_operator_dim(dim: u128, what: &str) -> Result<()> {
    let cap = operator_cap_qubits();
    if dim > 1u128 << cap {
        return config(format!(
            "{what}: operator dimension {dim} exceeds the cap of 2^{cap} = {}",
            1u128 << cap
        ));
    }
    Ok(())
}

/// Rejects state vectors of dimension above `2^(2 cap)`, the same memory as
/// the largest admissible dense operator.
pub fn check_state_dim(dim: u128, what: &str) -> Result<()> {
    let cap = 2 * operator_cap_qubits();
    if dim > 1u128 << cap {
        return config(format!(
            "{what}: state dimension {dim} exceeds the cap of 2^{cap} = {}",
            1u128 << cap
        ));
    }
    Ok(())
}

/// `base^exp` without overflow, saturating at `u128::MAX`.
pub(crate) fn checked_pow(base: usize, exp: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base as u128);
    }
    acc
}
