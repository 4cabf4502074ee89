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

//! Copy-permutation operators, symmetric-subspace projectors and the
//! maximally entangled state.

use num_complex::Complex64;

use super::cap::{check_operator_dim, checked_pow};
use super::linalg::{CMatrix, ZERO};
use super::operator::HermitianOp;
use super::state::StateVector;
use crate::error::{Error, Result};

/// Largest copy count for which the symmetric projector is built from the
/// full permutation sum.
pub const MAX_SYM_COPIES: usize = 4;

/// All permutations of `0..r` in lexicographic order.
pub fn permutations(r: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for k in 0..used.len() {
            if !used[k] {
                used[k] = true;
                prefix.push(k);
                rec(prefix, used, out);
                prefix.pop();
                used[k] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(r), &mut vec![false; r], &mut out);
    out
}

fn digits(mut index: usize, d: usize, r: usize) -> Vec<usize> {
    let mut out = vec![0; r];
    for k in (0..r).rev() {
        out[k] = index % d;
        index /= d;
    }
    out
}

fn undigits(ds: &[usize], d: usize) -> usize {
    ds.iter().fold(0, |acc, &x| acc * d + x)
}

/// Index image of a basis state under the copy permutation sending copy `k`
/// to slot `perm[k]`.
fn permuted_index(index: usize, d: usize, perm: &[usize]) -> usize {
    let src = digits(index, d, perm.len());
    let mut dst = vec![0; perm.len()];
    for (k, &p) in perm.iter().enumerate() {
        dst[p] = src[k];
    }
    undigits(&dst, d)
}

/// Permutation operator on `(C^d)^{(x) r}` moving copy `k` to slot `perm[k]`.
pub fn permutation_operator(d: usize, perm: &[usize]) -> CMatrix {
    let r = perm.len();
    let n = d.pow(r as u32);
    let mut m = CMatrix::zeros(n, n);
    for i in 0..n {
        m[(permuted_index(i, d, perm), i)] = Complex64::new(1.0, 0.0);
    }
    m
}

/// Projector onto the symmetric subspace of `r` copies of `C^d`, built as the
/// average of all `r!` permutation operators. Supports `1 <= r <= 4`.
pub fn sym_projector(d: usize, r: usize) -> Result<HermitianOp> {
    if d == 0 || r == 0 {
        return Err(Error::Config("symmetric projector needs d >= 1 and r >= 1".into()));
    }
    if r > MAX_SYM_COPIES {
        return Err(Error::Config(format!(
            "symmetric projector limited to r <= {MAX_SYM_COPIES} copies (got {r})"
        )));
    }
    check_operator_dim(checked_pow(d, r), "symmetric projector")?;
    let n = d.pow(r as u32);
    let perms = permutations(r);
    let w = Complex64::new(1.0 / perms.len() as f64, 0.0);
    let mut m = CMatrix::zeros(n, n);
    for i in 0..n {
        for p in &perms {
            m[(permuted_index(i, d, p), i)] += w;
        }
    }
    HermitianOp::new(m)
}

/// `(I - SWAP) / 2` on two copies of `C^d`.
pub fn antisym_projector_pair(d: usize) -> CMatrix {
    let n = d * d;
    let mut m = CMatrix::zeros(n, n);
    for i in 0..d {
        for j in 0..d {
            let a = i * d + j;
            let b = j * d + i;
            m[(a, a)] += Complex64::new(0.5, 0.0);
            m[(b, a)] -= Complex64::new(0.5, 0.0);
        }
    }
    m
}

/// `sum_i |ii> / sqrt(d)`.
pub fn max_entangled(d: usize) -> StateVector {
    let mut amps = vec![ZERO; d * d];
    let a = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
    for i in 0..d {
        amps[i * d + i] = a;
    }
    StateVector::new(amps).expect("maximally entangled state is nonzero")
}

/// `binom(n, k)` as `f64`.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::linalg::{c, hermitian_eigenvalues, kron, max_abs_diff, trace};
    use crate::qmath::{haar_unitary, partial_trace, RegisterLayout};

    #[test]
    fn single_copy_is_identity() {
        let p = sym_projector(5, 1).unwrap();
        assert!(max_abs_diff(p.matrix(), &CMatrix::identity(5, 5)) < 1e-15);
    }

    #[test]
    fn two_qubit_projector_is_identity_minus_singlet() {
        let p = sym_projector(2, 2).unwrap();
        let s = 1.0 / 2f64.sqrt();
        let singlet = StateVector::new(vec![ZERO, c(s, 0.0), c(-s, 0.0), ZERO]).unwrap();
        let expected = CMatrix::identity(4, 4) - singlet.outer();
        assert!(max_abs_diff(p.matrix(), &expected) < 1e-15);
        assert!((trace(p.matrix()).re - 3.0).abs() < 1e-12);
    }

    #[test]
    fn projector_laws_and_rank() {
        for (d, r) in [(2, 3), (3, 2), (2, 4), (3, 3)] {
            let p = sym_projector(d, r).unwrap();
            assert!(p.idempotence_defect() < 1e-12, "d={d} r={r}");
            let rank = trace(p.matrix()).re.round() as usize;
            assert_eq!(rank as f64, binomial(d + r - 1, r));
            let ev = hermitian_eigenvalues(p.matrix());
            assert!(ev.iter().all(|v| v.abs() < 1e-12 || (v - 1.0).abs() < 1e-12));
        }
    }

    #[test]
    fn commutes_with_collective_unitaries() {
        let u = haar_unitary(3, 17);
        let uu = kron(&kron(&u, &u), &u);
        let p = sym_projector(3, 3).unwrap();
        let lhs = &uu * p.matrix();
        let rhs = p.matrix() * &uu;
        assert!(max_abs_diff(&lhs, &rhs) < 1e-9);
    }

    #[test]
    fn rejects_large_copy_counts() {
        assert!(matches!(sym_projector(2, 5), Err(Error::Config(_))));
        assert!(matches!(sym_projector(4096, 2), Err(Error::Config(_))));
    }

    #[test]
    fn max_entangled_amplitudes_and_marginal() {
        let phi = max_entangled(2);
        let s = 1.0 / 2f64.sqrt();
        let expected = [c(s, 0.0), ZERO, ZERO, c(s, 0.0)];
        for (x, y) in phi.amplitudes().iter().zip(expected) {
            assert!((x - y).norm() < 1e-15);
        }
        let phi3 = max_entangled(3);
        assert!((phi3.inner(&phi3).re - 1.0).abs() < 1e-15);
        let layout = RegisterLayout::new(vec![("A", 3), ("B", 3)]).unwrap();
        let red = partial_trace(&phi3.density(), &layout, &["B"]).unwrap();
        let mixed = CMatrix::identity(3, 3) / c(3.0, 0.0);
        assert!(max_abs_diff(red.matrix(), &mixed) < 1e-15);
    }

    #[test]
    fn antisymmetric_complements_symmetric() {
        let s = sym_projector(3, 2).unwrap();
        let sum = s.matrix() + antisym_projector_pair(3);
        assert!(max_abs_diff(&sum, &CMatrix::identity(9, 9)) < 1e-15);
    }
}
