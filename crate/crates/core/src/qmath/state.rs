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

use num_complex::Complex64;

use super::linalg::{CMatrix, CVector, ZERO};
use super::operator::DensityMatrix;
use super::STRUCT_TOL;
use crate::error::{config, numeric, Result};

/// Normalized pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Normalizes `amps`; rejects empty or zero vectors.
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() {
            return config("state vector must have positive dimension");
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return numeric("cannot normalize a zero or non-finite vector");
        }
        Ok(Self {
            amps: amps.into_iter().map(|a| a / norm).collect(),
        })
    }

    /// Accepts `amps` only if already normalized within the structural tolerance.
    pub fn from_normalized(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() {
            return config("state vector must have positive dimension");
        }
        let n2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (n2.sqrt() - 1.0).abs() > STRUCT_TOL {
            return numeric(format!("state norm {} differs from 1", n2.sqrt()));
        }
        Ok(Self { amps })
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index out of range");
        let mut amps = vec![ZERO; dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Self { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn to_vector(&self) -> CVector {
        CVector::from_column_slice(&self.amps)
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        assert_eq!(self.dim(), other.dim(), "inner product of states of different dimension");
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn kron(&self, other: &StateVector) -> StateVector {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        StateVector { amps }
    }

    /// `r`-fold tensor power.
    pub fn tensor_power(&self, r: usize) -> StateVector {
        assert!(r >= 1, "tensor power needs r >= 1");
        let mut out = self.clone();
        for _ in 1..r {
            out = out.kron(self);
        }
        out
    }

    pub fn outer(&self) -> CMatrix {
        let n = self.dim();
        CMatrix::from_fn(n, n, |i, j| self.amps[i] * self.amps[j].conj())
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_pure_unchecked(self.outer())
    }
}
