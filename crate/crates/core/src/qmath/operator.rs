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

use super::linalg::{hermiticity_defect, hermitian_eigenvalues, trace, CMatrix};
use super::STRUCT_TOL;
use crate::error::{numeric, Result};

/// Hermitian positive semidefinite operator, possibly sub-normalized.
///
/// `trace_mass` is 1 for states and equals the outcome probability for the
/// unnormalized branches produced by measurements.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
    trace_mass: f64,
}

impl DensityMatrix {
    /// Validates hermiticity and positivity; the trace mass is read off the
    /// matrix.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let mass = trace(&matrix).re;
        Self::validated(matrix, mass, STRUCT_TOL)
    }

    /// Like [`DensityMatrix::new`] but also checks the trace against `trace_mass`.
    pub fn with_mass(matrix: CMatrix, trace_mass: f64) -> Result<Self> {
        Self::validated(matrix, trace_mass, STRUCT_TOL)
    }

    /// Validation with a caller-chosen tolerance, for Monte Carlo means.
    pub fn with_tolerance(matrix: CMatrix, tol: f64) -> Result<Self> {
        let mass = trace(&matrix).re;
        Self::validated(matrix, mass, tol)
    }

    pub(crate) fn from_pure_unchecked(matrix: CMatrix) -> Self {
        let trace_mass = trace(&matrix).re;
        Self { matrix, trace_mass }
    }

    fn validated(matrix: CMatrix, trace_mass: f64, tol: f64) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return numeric("density matrix must be square with positive dimension");
        }
        let defect = hermiticity_defect(&matrix);
        if defect > tol {
            return numeric(format!("density matrix not Hermitian (defect {defect:.3e})"));
        }
        let tr = trace(&matrix);
        if (tr.re - trace_mass).abs() > tol || tr.im.abs() > tol {
            return numeric(format!("trace {tr} differs from declared mass {trace_mass}"));
        }
        let min_eig = hermitian_eigenvalues(&matrix).first().copied().unwrap_or(0.0);
        if min_eig < -tol {
            return numeric(format!("density matrix not PSD (min eigenvalue {min_eig:.3e})"));
        }
        Ok(Self { matrix, trace_mass })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: CMatrix::identity(dim, dim) / num_complex::Complex64::new(dim as f64, 0.0),
            trace_mass: 1.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn trace_mass(&self) -> f64 {
        self.trace_mass
    }

    /// True for post-measurement branches with trace below 1.
    pub fn is_subnormalized(&self) -> bool {
        self.trace_mass < 1.0 - STRUCT_TOL
    }

    pub fn kron(&self, other: &DensityMatrix) -> DensityMatrix {
        Self {
            matrix: super::kron(&self.matrix, &other.matrix),
            trace_mass: self.trace_mass * other.trace_mass,
        }
    }

    /// Trace norm of `self - other`.
    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64> {
        super::linalg::trace_distance(&self.matrix, &other.matrix)
    }
}

/// Hermitian operator (observable, projector, or difference of states).
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOp {
    matrix: CMatrix,
}

impl HermitianOp {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return numeric("Hermitian operator must be square");
        }
        let defect = hermiticity_defect(&matrix);
        if defect > STRUCT_TOL {
            return numeric(format!("operator not Hermitian (defect {defect:.3e})"));
        }
        Ok(Self { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// Largest entry of `|P^2 - P|`.
    pub fn idempotence_defect(&self) -> f64 {
        super::linalg::max_abs_diff(&(&self.matrix * &self.matrix), &self.matrix)
    }

    pub fn is_projector(&self) -> bool {
        self.idempotence_defect() <= STRUCT_TOL
    }
}

impl From<DensityMatrix> for HermitianOp {
    fn from(d: DensityMatrix) -> Self {
        Self { matrix: d.matrix }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::linalg::{c, ONE, ZERO};

    #[test]
    fn rejects_non_psd_and_non_hermitian() {
        let neg = CMatrix::from_row_slice(2, 2, &[c(1.5, 0.0), ZERO, ZERO, c(-0.5, 0.0)]);
        assert!(DensityMatrix::new(neg).is_err());
        let nh = CMatrix::from_row_slice(2, 2, &[ONE, ONE, ZERO, ZERO]);
        assert!(DensityMatrix::new(nh.clone()).is_err());
        assert!(HermitianOp::new(nh).is_err());
    }

    #[test]
    fn subnormalized_flag() {
        let half = CMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), ZERO, ZERO, ZERO]);
        let d = DensityMatrix::with_mass(half.clone(), 0.5).unwrap();
        assert!(d.is_subnormalized());
        assert!(DensityMatrix::with_mass(half, 1.0).is_err());
    }
}
