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

//! Register layouts and subsystem bookkeeping: partial traces, local
//! operator application and subsystem permutations.

use std::collections::HashSet;

use num_complex::Complex64;

use super::linalg::{CMatrix, ZERO};
use super::operator::DensityMatrix;
use crate::error::{config, Result};

/// Ordered subsystem structure. Subsystem 0 is the most significant factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegisterLayout {
    subsystems: Vec<(String, usize)>,
}

impl RegisterLayout {
    pub fn new<S: Into<String>>(subsystems: Vec<(S, usize)>) -> Result<Self> {
        let subsystems: Vec<(String, usize)> =
            subsystems.into_iter().map(|(l, d)| (l.into(), d)).collect();
        if subsystems.is_empty() {
            return config("register layout needs at least one subsystem");
        }
        let mut seen = HashSet::new();
        for (label, dim) in &subsystems {
            if *dim == 0 {
                return config(format!("subsystem {label:?} has dimension 0"));
            }
            if !seen.insert(label.as_str()) {
                return config(format!("duplicate subsystem label {label:?}"));
            }
        }
        Ok(Self { subsystems })
    }

    /// `n` qubits labelled `{prefix}0 .. {prefix}{n-1}`.
    pub fn qubits(prefix: &str, n: usize) -> Self {
        Self::new((0..n).map(|i| (format!("{prefix}{i}"), 2)).collect())
            .expect("qubit layout is always valid")
    }

    pub fn subsystems(&self) -> &[(String, usize)] {
        &self.subsystems
    }

    pub fn len(&self) -> usize {
        self.subsystems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsystems.is_empty()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.subsystems.iter().map(|(_, d)| *d).collect()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.subsystems.iter().map(|(l, _)| l.as_str()).collect()
    }

    pub fn dim(&self) -> usize {
        self.subsystems.iter().map(|(_, d)| *d).product()
    }

    pub fn position(&self, label: &str) -> Result<usize> {
        self.subsystems
            .iter()
            .position(|(l, _)| l == label)
            .ok_or_else(|| crate::Error::Config(format!("unknown subsystem label {label:?}")))
    }

    /// Positions of `labels`, sorted into layout order.
    pub fn positions(&self, labels: &[&str]) -> Result<Vec<usize>> {
        let mut pos = labels
            .iter()
            .map(|l| self.position(l))
            .collect::<Result<Vec<_>>>()?;
        pos.sort_unstable();
        pos.dedup();
        Ok(pos)
    }

    /// Concatenation; `self` stays the more significant part.
    pub fn concat(&self, other: &RegisterLayout) -> Result<Self> {
        let mut all = self.subsystems.clone();
        all.extend(other.subsystems.iter().cloned());
        Self::new(all)
    }

    /// Layout restricted to `positions` (kept in the given order).
    pub fn select(&self, positions: &[usize]) -> Result<Self> {
        Self::new(positions.iter().map(|&p| self.subsystems[p].clone()).collect())
    }

    pub(crate) fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim() != dim {
            return config(format!(
                "layout dimension {} does not match operator dimension {dim}",
                self.dim()
            ));
        }
        Ok(())
    }
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// Full-register index offsets of every configuration of `targets`, the
/// first target being the most significant digit of the configuration index.
pub fn subsystem_offsets(dims: &[usize], targets: &[usize]) -> Vec<usize> {
    let st = strides(dims);
    let total: usize = targets.iter().map(|&t| dims[t]).product();
    let mut out = Vec::with_capacity(total);
    let mut digits = vec![0usize; targets.len()];
    for _ in 0..total {
        out.push(digits.iter().zip(targets).map(|(d, &t)| d * st[t]).sum());
        for k in (0..targets.len()).rev() {
            digits[k] += 1;
            if digits[k] < dims[targets[k]] {
                break;
            }
            digits[k] = 0;
        }
    }
    out
}

/// Positions not in `targets`, in layout order.
pub fn complement(n: usize, targets: &[usize]) -> Vec<usize> {
    (0..n).filter(|p| !targets.contains(p)).collect()
}

/// Partial trace of a raw matrix keeping `keep` (layout positions, any order;
/// the output follows layout order).
pub fn partial_trace_matrix(m: &CMatrix, dims: &[usize], keep: &[usize]) -> CMatrix {
    let mut keep = keep.to_vec();
    keep.sort_unstable();
    let traced = complement(dims.len(), &keep);
    let ko = subsystem_offsets(dims, &keep);
    let to = subsystem_offsets(dims, &traced);
    let mut out = CMatrix::zeros(ko.len(), ko.len());
    for k2 in 0..ko.len() {
        for k1 in 0..ko.len() {
            let mut acc = ZERO;
            for &t in &to {
                acc += m[(ko[k1] + t, ko[k2] + t)];
            }
            out[(k1, k2)] = acc;
        }
    }
    out
}

/// Reduced operator on the subsystems named in `keep`, in layout order.
pub fn partial_trace(rho: &DensityMatrix, layout: &RegisterLayout, keep: &[&str]) -> Result<DensityMatrix> {
    layout.check_dim(rho.dim())?;
    if keep.is_empty() {
        return config("partial trace must keep at least one subsystem");
    }
    let pos = layout.positions(keep)?;
    let reduced = partial_trace_matrix(rho.matrix(), &layout.dims(), &pos);
    DensityMatrix::with_mass(reduced, rho.trace_mass())
}

/// Inverse of tracing out `mixed`: places `I / d_mixed` on the positions in
/// `mixed` and `rest` (an operator on the complement, in layout order) on the
/// others.
pub fn embed_maximally_mixed(rest: &CMatrix, dims: &[usize], mixed: &[usize]) -> CMatrix {
    let keep = complement(dims.len(), mixed);
    let ko = subsystem_offsets(dims, &keep);
    let to = subsystem_offsets(dims, mixed);
    assert_eq!(rest.nrows(), ko.len(), "embedded operator has the wrong dimension");
    let total: usize = dims.iter().product();
    let scale = 1.0 / to.len() as f64;
    let mut out = CMatrix::zeros(total, total);
    for k2 in 0..ko.len() {
        for k1 in 0..ko.len() {
            let v = rest[(k1, k2)] * scale;
            if v == ZERO {
                continue;
            }
            for &t in &to {
                out[(ko[k1] + t, ko[k2] + t)] = v;
            }
        }
    }
    out
}

/// Applies `op` to the subsystems `targets` of the vector `amps`, in place.
pub fn apply_local(amps: &mut [Complex64], dims: &[usize], targets: &[usize], op: &CMatrix) {
    let to = subsystem_offsets(dims, targets);
    assert_eq!(op.nrows(), to.len(), "local operator has the wrong dimension");
    let base = subsystem_offsets(dims, &complement(dims.len(), targets));
    let mut gathered = vec![ZERO; to.len()];
    for b in base {
        for (g, &o) in gathered.iter_mut().zip(&to) {
            *g = amps[b + o];
        }
        for (i, &o) in to.iter().enumerate() {
            let mut acc = ZERO;
            for (j, g) in gathered.iter().enumerate() {
                acc += op[(i, j)] * g;
            }
            amps[b + o] = acc;
        }
    }
}

/// `(U_targets) M (U_targets)^dagger`.
pub fn conjugate_local(m: &CMatrix, dims: &[usize], targets: &[usize], u: &CMatrix) -> CMatrix {
    let mut left = m.clone();
    for mut col in left.column_iter_mut() {
        apply_local(col.as_mut_slice(), dims, targets, u);
    }
    let mut adj = left.adjoint();
    for mut col in adj.column_iter_mut() {
        apply_local(col.as_mut_slice(), dims, targets, u);
    }
    adj.adjoint()
}

/// Reorders subsystems of a vector: subsystem `k` of the result is subsystem
/// `perm[k]` of the input.
pub fn permute_vector(amps: &[Complex64], dims: &[usize], perm: &[usize]) -> Vec<Complex64> {
    let map = permutation_map(dims, perm);
    let mut out = vec![ZERO; amps.len()];
    for (old, &new) in map.iter().enumerate() {
        out[new] = amps[old];
    }
    out
}

/// Matrix counterpart of [`permute_vector`].
pub fn permute_matrix(m: &CMatrix, dims: &[usize], perm: &[usize]) -> CMatrix {
    let map = permutation_map(dims, perm);
    let n = map.len();
    let mut out = CMatrix::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            out[(map[i], map[j])] = m[(i, j)];
        }
    }
    out
}

/// `map[old_index] = new_index` for the subsystem permutation `perm`.
fn permutation_map(dims: &[usize], perm: &[usize]) -> Vec<usize> {
    assert_eq!(dims.len(), perm.len(), "permutation length mismatch");
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let new_strides = strides(&new_dims);
    // new position of each old subsystem
    let mut where_new = vec![0usize; perm.len()];
    for (k, &p) in perm.iter().enumerate() {
        where_new[p] = k;
    }
    let total: usize = dims.iter().product();
    let mut map = vec![0usize; total];
    let mut digits = vec![0usize; dims.len()];
    for slot in map.iter_mut() {
        *slot = digits
            .iter()
            .enumerate()
            .map(|(old, d)| d * new_strides[where_new[old]])
            .sum();
        for k in (0..dims.len()).rev() {
            digits[k] += 1;
            if digits[k] < dims[k] {
                break;
            }
            digits[k] = 0;
        }
    }
    map
}

/// Projects `amps` onto the symmetric subspace of the equal-dimension
/// subsystems `p` and `q`: `v -> (v + SWAP_pq v) / 2`, in place.
pub fn symmetrize_pair(amps: &mut [Complex64], dims: &[usize], p: usize, q: usize) {
    assert_eq!(dims[p], dims[q], "swap test between subsystems of different dimension");
    assert_ne!(p, q, "swap test needs two distinct subsystems");
    let st = strides(dims);
    let (sp, sq, d) = (st[p], st[q], dims[p]);
    for x in 0..amps.len() {
        let dp = (x / sp) % d;
        let dq = (x / sq) % d;
        if dp < dq {
            let y = x + dq * sp + dp * sq - dp * sp - dq * sq;
            let avg = (amps[x] + amps[y]) * 0.5;
            amps[x] = avg;
            amps[y] = avg;
        }
    }
}

/// Reduced operator `tr_rest |v><v|` on the subsystems `keep` (layout order)
/// of an unnormalized vector.
pub fn partial_trace_vector(amps: &[Complex64], dims: &[usize], keep: &[usize]) -> CMatrix {
    let mut keep = keep.to_vec();
    keep.sort_unstable();
    let ko = subsystem_offsets(dims, &keep);
    let to = subsystem_offsets(dims, &complement(dims.len(), &keep));
    let mut out = CMatrix::zeros(ko.len(), ko.len());
    for &t in &to {
        for (i, &a) in ko.iter().enumerate() {
            let va = amps[t + a];
            if va == ZERO {
                continue;
            }
            for (j, &b) in ko.iter().enumerate() {
                out[(i, j)] += va * amps[t + b].conj();
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::linalg::{c, kron, max_abs_diff};
    use crate::qmath::{haar_state, max_entangled, DensityMatrix};

    #[test]
    fn layout_rejects_duplicates_and_zero_dims() {
        assert!(RegisterLayout::new(vec![("A", 2), ("A", 2)]).is_err());
        assert!(RegisterLayout::new(vec![("A", 0)]).is_err());
        assert!(RegisterLayout::new(Vec::<(String, usize)>::new()).is_err());
    }

    #[test]
    fn bell_marginal_is_maximally_mixed() {
        let phi = max_entangled(2).density();
        let layout = RegisterLayout::new(vec![("L", 2), ("R", 2)]).unwrap();
        let red = partial_trace(&phi, &layout, &["L"]).unwrap();
        let half = CMatrix::identity(2, 2) * c(0.5, 0.0);
        assert!(max_abs_diff(red.matrix(), &half) < 1e-15);
    }

    #[test]
    fn product_state_factorizes() {
        let rho = haar_state(2, 1).density();
        let sigma = haar_state(3, 2).density();
        let joint = DensityMatrix::new(kron(rho.matrix(), sigma.matrix())).unwrap();
        let layout = RegisterLayout::new(vec![("A", 2), ("B", 3)]).unwrap();
        let red = partial_trace(&joint, &layout, &["A"]).unwrap();
        assert!(max_abs_diff(red.matrix(), rho.matrix()) < 1e-14);
        let red_b = partial_trace(&joint, &layout, &["B"]).unwrap();
        assert!(max_abs_diff(red_b.matrix(), sigma.matrix()) < 1e-14);
    }

    #[test]
    fn three_qubit_trace_matches_index_summation() {
        let psi = haar_state(8, 11);
        let rho = psi.density();
        let layout = RegisterLayout::qubits("q", 3);
        let red = partial_trace(&rho, &layout, &["q2"]).unwrap();
        // naive summation over the two traced bits
        let a = psi.amplitudes();
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = ZERO;
                for x in 0..2 {
                    for y in 0..2 {
                        acc += a[x * 4 + y * 2 + i] * a[x * 4 + y * 2 + j].conj();
                    }
                }
                assert!((red.matrix()[(i, j)] - acc).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn partial_traces_compose() {
        let rho = haar_state(24, 5).density();
        let layout = RegisterLayout::new(vec![("A", 2), ("B", 3), ("C", 4)]).unwrap();
        let once = partial_trace(&rho, &layout, &["C"]).unwrap();
        let step = partial_trace(&rho, &layout, &["B", "C"]).unwrap();
        let inner = RegisterLayout::new(vec![("B", 3), ("C", 4)]).unwrap();
        let twice = partial_trace(&step, &inner, &["C"]).unwrap();
        assert!(max_abs_diff(once.matrix(), twice.matrix()) < 1e-12);
    }

    #[test]
    fn label_mismatch_is_config_error() {
        let rho = haar_state(4, 1).density();
        let layout = RegisterLayout::qubits("q", 2);
        assert!(matches!(partial_trace(&rho, &layout, &["zz"]), Err(crate::Error::Config(_))));
        let bad = RegisterLayout::qubits("q", 3);
        assert!(partial_trace(&rho, &bad, &["q0"]).is_err());
    }

    #[test]
    fn permutation_round_trip_and_local_action() {
        let psi = haar_state(12, 3);
        let dims = [2, 3, 2];
        let p = permute_vector(psi.amplitudes(), &dims, &[2, 0, 1]);
        let back = permute_vector(&p, &[2, 2, 3], &[1, 2, 0]);
        for (a, b) in back.iter().zip(psi.amplitudes()) {
            assert!((a - b).norm() < 1e-15);
        }
        // local X on the last qubit equals kron(I_6, X)
        let x = CMatrix::from_row_slice(2, 2, &[ZERO, c(1.0, 0.0), c(1.0, 0.0), ZERO]);
        let mut v = psi.amplitudes().to_vec();
        apply_local(&mut v, &dims, &[2], &x);
        let full = kron(&CMatrix::identity(6, 6), &x);
        let w = &full * crate::qmath::CVector::from_column_slice(psi.amplitudes());
        for (a, b) in v.iter().zip(w.iter()) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn embed_inverts_trace_on_product() {
        let sigma = haar_state(3, 9).density();
        let full = embed_maximally_mixed(sigma.matrix(), &[2, 3], &[0]);
        let expected = kron(&(CMatrix::identity(2, 2) * c(0.5, 0.0)), sigma.matrix());
        assert!(max_abs_diff(&full, &expected) < 1e-15);
    }

    #[test]
    fn symmetrize_matches_swap_average() {
        let psi = haar_state(2 * 3 * 2, 31);
        let dims = [2, 3, 2];
        let mut v = psi.amplitudes().to_vec();
        symmetrize_pair(&mut v, &dims, 0, 2);
        let swapped = permute_vector(psi.amplitudes(), &dims, &[2, 1, 0]);
        for ((a, x), y) in v.iter().zip(psi.amplitudes()).zip(&swapped) {
            assert!((a - (x + y) * 0.5).norm() < 1e-15);
        }
        let mut w = v.clone();
        symmetrize_pair(&mut w, &dims, 0, 2);
        assert_eq!(w, v);
    }

    #[test]
    fn vector_partial_trace_matches_density_route() {
        let psi = haar_state(12, 32);
        let dims = [2, 3, 2];
        let a = partial_trace_vector(psi.amplitudes(), &dims, &[2, 0]);
        let b = partial_trace_matrix(&psi.outer(), &dims, &[0, 2]);
        assert!(crate::qmath::linalg::max_abs_diff(&a, &b) < 1e-15);
    }
}
