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

//! Matrix kernels: Kronecker products, Hermitian spectra and trace norms.
//!
//! Hermitian spectra are computed per connected component of the nonzero
//! pattern. The ensemble operators in this crate are extremely sparse in the
//! computational basis (symmetric projectors, twirled moments), which makes
//! exact trace norms at dimension 4096 cheap.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{numeric, Result};

use super::STRUCT_TOL;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Tensor product with `a` as the more significant factor: entry
/// `(iA * dimB + iB, jA * dimB + jB)` equals `a[iA, jA] * b[iB, jB]`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

/// Largest entrywise deviation `|M - M^dagger|`.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in 0..=j {
            let d = (m[(i, j)] - m[(j, i)].conj()).norm();
            worst = worst.max(d);
        }
    }
    worst
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn trace(m: &CMatrix) -> Complex64 {
    (0..m.nrows().min(m.ncols())).map(|i| m[(i, i)]).sum()
}

struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Index sets of the connected components of the nonzero pattern of a square
/// matrix. A Hermitian matrix is block diagonal with respect to them.
pub fn sparsity_blocks(m: &CMatrix) -> Vec<Vec<usize>> {
    let n = m.nrows();
    let mut sets = DisjointSets::new(n);
    for j in 0..n {
        let col = m.column(j);
        for (i, v) in col.iter().enumerate() {
            if i != j && (v.re != 0.0 || v.im != 0.0) {
                sets.union(i, j);
            }
        }
    }
    let mut by_root: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        let r = sets.find(i);
        by_root[r].push(i);
    }
    by_root.into_iter().filter(|b| !b.is_empty()).collect()
}

fn submatrix(m: &CMatrix, idx: &[usize]) -> CMatrix {
    CMatrix::from_fn(idx.len(), idx.len(), |i, j| m[(idx[i], idx[j])])
}

fn block_eigenvalues(block: &CMatrix) -> Vec<f64> {
    match block.nrows() {
        1 => vec![block[(0, 0)].re],
        2 => {
            let a = block[(0, 0)].re;
            let d = block[(1, 1)].re;
            let b = block[(0, 1)];
            let mean = 0.5 * (a + d);
            let rad = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
            vec![mean - rad, mean + rad]
        }
        _ => block.clone().symmetric_eigenvalues().iter().copied().collect(),
    }
}

/// Eigenvalues of a Hermitian matrix in ascending order. Only the lower
/// triangle is trusted by the dense solver, so callers validate hermiticity.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    assert!(m.is_square(), "eigenvalues of a non-square matrix");
    let mut out = Vec::with_capacity(m.nrows());
    for idx in sparsity_blocks(m) {
        if idx.len() == m.nrows() {
            out.extend(block_eigenvalues(m));
        } else {
            out.extend(block_eigenvalues(&submatrix(m, &idx)));
        }
    }
    out.sort_by(|a, b| a.partial_cmp(b).expect("NaN eigenvalue"));
    out
}

/// Full eigendecomposition `(values, vectors)` of a Hermitian matrix; column
/// `k` of `vectors` belongs to `values[k]`. Values are ascending.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = m.clone().symmetric_eigen();
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

/// Trace norm of a Hermitian matrix, rejecting inputs that are not Hermitian
/// within the structural tolerance.
pub fn trace_norm_matrix(m: &CMatrix) -> Result<f64> {
    let defect = hermiticity_defect(m);
    if defect > STRUCT_TOL {
        return numeric(format!("trace norm of a non-Hermitian operator (defect {defect:.3e})"));
    }
    Ok(hermitian_eigenvalues(m).iter().map(|v| v.abs()).sum())
}

/// Trace norm (sum of absolute eigenvalues) of a Hermitian operator.
pub fn trace_norm(h: &super::HermitianOp) -> f64 {
    hermitian_eigenvalues(h.matrix()).iter().map(|v| v.abs()).sum()
}

/// Trace norm of `a - b`.
pub fn trace_distance(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    trace_norm_matrix(&(a - b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pauli_x() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
    }

    fn pauli_z() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
    }

    #[test]
    fn kron_identities() {
        assert_eq!(kron(&identity(2), &identity(2)), identity(4));
    }

    #[test]
    fn kron_x_z_hand_expanded() {
        // X (x) Z = [[0, Z], [Z, 0]]
        let k = kron(&pauli_x(), &pauli_z());
        let expected = [
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, -1.0],
            [1.0, 0.0, 0.0, 0.0],
            [0.0, -1.0, 0.0, 0.0],
        ];
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(k[(i, j)], c(expected[i][j], 0.0), "entry ({i},{j})");
            }
        }
    }

    #[test]
    fn trace_norm_of_z_and_zero() {
        assert!((trace_norm_matrix(&pauli_z()).unwrap() - 2.0).abs() < 1e-12);
        let z = pauli_z();
        assert_eq!(trace_norm_matrix(&(&z - &z)).unwrap(), 0.0);
    }

    #[test]
    fn trace_norm_zero_minus_plus() {
        let h = 0.5f64;
        let zero = CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ZERO]);
        let plus = CMatrix::from_element(2, 2, c(h, 0.0));
        // eigenvalues of |0><0| - |+><+| are +-1/sqrt(2)
        let tn = trace_norm_matrix(&(zero - plus)).unwrap();
        assert!((tn - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]);
        assert!(trace_norm_matrix(&m).is_err());
    }

    #[test]
    fn blocks_match_dense_solver() {
        // block diagonal after permutation: {0,2} and {1,3}
        let mut m = CMatrix::zeros(4, 4);
        m[(0, 0)] = c(1.0, 0.0);
        m[(2, 2)] = c(-0.5, 0.0);
        m[(0, 2)] = c(0.3, 0.4);
        m[(2, 0)] = c(0.3, -0.4);
        m[(1, 1)] = c(2.0, 0.0);
        m[(3, 3)] = c(0.25, 0.0);
        m[(1, 3)] = c(0.0, 0.1);
        m[(3, 1)] = c(0.0, -0.1);
        assert_eq!(sparsity_blocks(&m).len(), 2);
        let fast = hermitian_eigenvalues(&m);
        let mut dense: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
        dense.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, b) in fast.iter().zip(&dense) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
