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

//! Multi-copy distinguisher against the one-time-pad family and the
//! concentration statistics behind it.
//!
//! Registers for `c` copy pairs are ordered `(cand_1, ref_1, ..., cand_c,
//! ref_c)`, each an `m`-qubit block. The key-`k` test rotates every reference
//! block by `U_k` and projects each `(cand_i, ref_i)` pair onto its symmetric
//! subspace. Repetitions cycle over the `c` physical pairs; a repeated
//! projection is idempotent, so only `min(ell, c)` distinct pairs act.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{config, Result};
use crate::prs::PauliKey;
use crate::qmath::cap::{check_operator_dim, check_state_dim, checked_pow};
use crate::qmath::layout::symmetrize_pair;
use crate::qmath::linalg::{CMatrix, ZERO};
use crate::qmath::{haar_state_with, lueders_update, seed, DensityMatrix, HermitianOp, StateVector};

/// Branch mass below which the sequential test stops descending.
pub const DEFAULT_PRUNE: f64 = 1e-12;

/// Largest key length whose key set is enumerated.
pub const MAX_KEY_BITS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttackConfig {
    /// Qubits of the attacked state.
    pub m: usize,
    /// Key bits of the attacked family.
    pub n: usize,
    /// Candidate/reference copy pairs.
    pub c: usize,
    /// Swap-test repetitions per key.
    pub ell: usize,
    pub order_seed: u64,
    pub trials: usize,
}

impl AttackConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.c == 0 || self.ell == 0 {
            return config("attack needs m >= 1, c >= 1 and ell >= 1");
        }
        if self.n > MAX_KEY_BITS {
            return config(format!("key length {} exceeds the enumerable limit {MAX_KEY_BITS}", self.n));
        }
        if self.n / 2 > self.m {
            return config(format!("pad of {} qubits exceeds m = {}", self.n / 2, self.m));
        }
        check_state_dim(checked_pow(2, 2 * self.c * self.m), "attack register")
    }

    pub fn pad_qubits(&self) -> usize {
        self.n / 2
    }

    pub fn key_count(&self) -> usize {
        PauliKey::count(self.pad_qubits())
    }

    pub fn effective_repetitions(&self) -> usize {
        self.ell.min(self.c)
    }

    pub fn total_qubits(&self) -> usize {
        2 * self.c * self.m
    }

    fn dims(&self) -> Vec<usize> {
        vec![1usize << self.m; 2 * self.c]
    }
}

/// A keyed family whose members can be applied to reference blocks.
pub trait AttackTarget: Sync {
    fn qubits(&self) -> usize;
    fn key_count(&self) -> usize;
    /// Applies `U_key` (or its inverse) to the `m`-qubit block starting at
    /// qubit `offset` of a `total`-qubit vector.
    fn apply(&self, key: usize, inverse: bool, amps: &mut [Complex64], offset: usize, total: usize);
}

/// The one-time-pad family on the first `s` of `m` qubits.
#[derive(Debug, Clone, Copy)]
pub struct PadTarget {
    pub m: usize,
    pub s: usize,
}

impl AttackTarget for PadTarget {
    fn qubits(&self) -> usize {
        self.m
    }

    fn key_count(&self) -> usize {
        PauliKey::count(self.s)
    }

    fn apply(&self, key: usize, inverse: bool, amps: &mut [Complex64], offset: usize, total: usize) {
        let k = PauliKey::from_index(self.m, self.s, key).expect("key in range");
        // (X^a Z^b)^dagger = (-1)^{a.b} X^a Z^b
        k.apply(amps, offset, total);
        if inverse && (k.a & k.b).count_ones() % 2 == 1 {
            amps.iter_mut().for_each(|v| *v = -*v);
        }
    }
}

/// `Pi_key v`, in place.
pub fn apply_attack_projector(target: &dyn AttackTarget, cfg: &AttackConfig, key: usize, amps: &mut [Complex64]) {
    let m = cfg.m;
    let total = cfg.total_qubits();
    let dims = cfg.dims();
    for i in 0..cfg.c {
        target.apply(key, false, amps, (2 * i + 1) * m, total);
    }
    for i in 0..cfg.effective_repetitions() {
        symmetrize_pair(amps, &dims, 2 * i, 2 * i + 1);
    }
    for i in 0..cfg.c {
        target.apply(key, true, amps, (2 * i + 1) * m, total);
    }
}

/// Dense `Pi_k` for the pad family.
pub fn attack_projector(key: &PauliKey, cfg: &AttackConfig) -> Result<HermitianOp> {
    cfg.validate()?;
    if key.m != cfg.m || key.s != cfg.pad_qubits() {
        return config("key does not match the attack configuration");
    }
    check_operator_dim(checked_pow(2, cfg.total_qubits()), "attack projector")?;
    let target = PadTarget { m: cfg.m, s: cfg.pad_qubits() };
    let dim = 1usize << cfg.total_qubits();
    let mut out = CMatrix::zeros(dim, dim);
    for x in 0..dim {
        let mut v = vec![ZERO; dim];
        v[x] = Complex64::new(1.0, 0.0);
        apply_attack_projector(&target, cfg, key.index(), &mut v);
        for (y, a) in v.iter().enumerate() {
            out[(y, x)] = *a;
        }
    }
    HermitianOp::new(out)
}

/// Key order for a trial: a uniformly random permutation drawn from
/// `derive(order_seed, trial)`.
pub fn key_order(keys: usize, order_seed: u64, trial: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..keys).collect();
    order.shuffle(&mut seed::rng_for(order_seed, trial));
    order
}

/// Result of a sequential OR test on a density matrix.
#[derive(Debug, Clone)]
pub struct OrOutcome {
    pub accept_probability: f64,
    /// Sum of the accepted branches (sub-normalized).
    pub accepted: DensityMatrix,
    /// Branch that rejected every projector (sub-normalized).
    pub rejected: DensityMatrix,
}

/// Measures `{P_k, I - P_k}` in the given order, stopping at the first
/// acceptance. Branches with mass below `prune` are dropped.
pub fn sequential_or_dense(rho: &DensityMatrix, projectors: &[HermitianOp], order: &[usize], prune: f64) -> Result<OrOutcome> {
    let dim = rho.dim();
    let mut accepted = CMatrix::zeros(dim, dim);
    let mut accept = 0.0;
    let mut current = rho.clone();
    for &k in order {
        if current.trace_mass() < prune {
            break;
        }
        let p = &projectors[k];
        let (prob, branch) = lueders_update(&current, p)?;
        accept += prob;
        accepted += branch.matrix();
        let comp = HermitianOp::new(CMatrix::identity(dim, dim) - p.matrix())?;
        current = lueders_update(&current, &comp)?.1;
    }
    Ok(OrOutcome {
        accept_probability: accept,
        accepted: DensityMatrix::with_mass(accepted, accept)?,
        rejected: current,
    })
}

/// Sequential OR test of the attack projectors on `rho`, in the key order of
/// trial `trial`.
pub fn sequential_or_test(rho: &DensityMatrix, cfg: &AttackConfig, trial: u64) -> Result<OrOutcome> {
    cfg.validate()?;
    let keys = PauliKey::all(cfg.m, cfg.pad_qubits())?;
    let projectors = keys.iter().map(|k| attack_projector(k, cfg)).collect::<Result<Vec<_>>>()?;
    let order = key_order(keys.len(), cfg.order_seed, trial);
    sequential_or_dense(rho, &projectors, &order, DEFAULT_PRUNE)
}

/// Exact acceptance probability of the sequential test on a pure state,
/// following the single rejecting path of the measurement tree.
pub fn sequential_or_vector(
    target: &dyn AttackTarget,
    cfg: &AttackConfig,
    v: &[Complex64],
    order: &[usize],
    prune: f64,
) -> f64 {
    let mut rest = v.to_vec();
    let mut accept = 0.0;
    for &k in order {
        let mass: f64 = rest.iter().map(|a| a.norm_sqr()).sum();
        if mass < prune {
            break;
        }
        let mut hit = rest.clone();
        apply_attack_projector(target, cfg, k, &mut hit);
        accept += hit.iter().map(|a| a.norm_sqr()).sum::<f64>();
        for (r, h) in rest.iter_mut().zip(&hit) {
            *r -= h;
        }
    }
    accept
}

/// `tr(Pi_k |v><v|)` for every key.
pub fn key_overlaps(target: &dyn AttackTarget, cfg: &AttackConfig, v: &[Complex64]) -> Vec<f64> {
    (0..target.key_count())
        .map(|k| {
            let mut hit = v.to_vec();
            apply_attack_projector(target, cfg, k, &mut hit);
            hit.iter().map(|a| a.norm_sqr()).sum()
        })
        .collect()
}

/// `(cand_1, ref_1, ..., cand_c, ref_c)` with every candidate `cand` and
/// every reference `reference`.
pub fn paired_register(cand: &StateVector, reference: &StateVector, c: usize) -> StateVector {
    cand.kron(reference).tensor_power(c)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackReport {
    pub config: AttackConfig,
    pub accept_rate_pseudorandom: f64,
    pub stderr_pseudorandom: f64,
    pub accept_rate_haar: f64,
    pub stderr_haar: f64,
    pub advantage: f64,
    /// Largest `1 - max_k tr(Pi_k rho)` over pseudorandom trials.
    pub epsilon: f64,
    /// `(1 - epsilon)^2 / 7`.
    pub case1_floor: f64,
    /// Mean over Haar trials of `max_k tr(Pi_k rho)`.
    pub delta: f64,
    /// `4 N delta` with `N = 2^n` keys.
    pub case2_measured_ceiling: f64,
    /// `4 * 2^n * (3/4)^ell`.
    pub case2_ceiling: f64,
    pub case2_vacuous: bool,
    pub effective_repetitions: usize,
    pub per_trial_pseudorandom: Vec<f64>,
    pub per_trial_haar: Vec<f64>,
}

struct TrialOutcome {
    pr: f64,
    haar: f64,
    eps: f64,
    delta: f64,
}

fn mean_and_stderr(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Runs the distinguisher on `trials` sampled `(psi, k, phi)`: candidates are
/// `U_k psi` in the pseudorandom case and a fresh Haar `phi` in the random
/// case, references are copies of `psi`.
pub fn run_attack(cfg: &AttackConfig, seed: u64) -> Result<AttackReport> {
    cfg.validate()?;
    if cfg.trials == 0 {
        return config("attack needs at least one trial");
    }
    let target = PadTarget { m: cfg.m, s: cfg.pad_qubits() };
    let dim = 1usize << cfg.m;
    let outcomes: Vec<TrialOutcome> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = seed::rng_for(seed, t as u64);
            let psi = haar_state_with(dim, &mut rng);
            let key = rng.random_range(0..target.key_count());
            let phi = haar_state_with(dim, &mut rng);
            let mut cand = psi.amplitudes().to_vec();
            target.apply(key, false, &mut cand, 0, cfg.m);
            let cand = StateVector::from_normalized(cand).expect("unitary action");
            let order = key_order(target.key_count(), cfg.order_seed, t as u64);
            let pr_state = paired_register(&cand, &psi, cfg.c);
            let haar_state = paired_register(&phi, &psi, cfg.c);
            let pr = sequential_or_vector(&target, cfg, pr_state.amplitudes(), &order, DEFAULT_PRUNE);
            let haar = sequential_or_vector(&target, cfg, haar_state.amplitudes(), &order, DEFAULT_PRUNE);
            let best = |v: Vec<f64>| v.into_iter().fold(0.0, f64::max);
            TrialOutcome {
                pr,
                haar,
                eps: 1.0 - best(key_overlaps(&target, cfg, pr_state.amplitudes())),
                delta: best(key_overlaps(&target, cfg, haar_state.amplitudes())),
            }
        })
        .collect();
    let pr: Vec<f64> = outcomes.iter().map(|o| o.pr).collect();
    let haar: Vec<f64> = outcomes.iter().map(|o| o.haar).collect();
    let (mp, sp) = mean_and_stderr(&pr);
    let (mh, sh) = mean_and_stderr(&haar);
    let epsilon = outcomes.iter().map(|o| o.eps).fold(0.0, f64::max).max(0.0);
    let delta = outcomes.iter().map(|o| o.delta).sum::<f64>() / cfg.trials as f64;
    let keys = (1u64 << cfg.n) as f64;
    let case2_ceiling = 4.0 * keys * 0.75f64.powi(cfg.ell as i32);
    Ok(AttackReport {
        config: *cfg,
        accept_rate_pseudorandom: mp,
        stderr_pseudorandom: sp,
        accept_rate_haar: mh,
        stderr_haar: sh,
        advantage: mp - mh,
        epsilon,
        case1_floor: (1.0 - epsilon).powi(2) / 7.0,
        delta,
        case2_measured_ceiling: 4.0 * keys * delta,
        case2_ceiling,
        case2_vacuous: case2_ceiling > 1.0,
        effective_repetitions: cfg.effective_repetitions(),
        per_trial_pseudorandom: pr,
        per_trial_haar: haar,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailReport {
    pub d: usize,
    pub samples: usize,
    /// Fraction of samples with `|<psi|e_0>|^2 >= 1/2`.
    pub fraction: f64,
    /// `(1/2)^{d-1}`, the exact tail of the overlap distribution.
    pub analytic: f64,
    /// Binomial standard error at the analytic rate.
    pub stderr: f64,
    /// `8 exp(-d / 600)`.
    pub bound: f64,
    pub bound_vacuous: bool,
}

impl TailReport {
    pub fn within_sigma(&self, k: f64) -> bool {
        (self.fraction - self.analytic).abs() <= k * self.stderr
    }
}

pub fn haar_overlap_tail(d: usize, samples: usize, seed: u64) -> Result<TailReport> {
    if d == 0 || samples == 0 {
        return config("overlap tail needs d >= 1 and samples >= 1");
    }
    check_state_dim(d as u128, "overlap tail state")?;
    let hits: usize = (0..samples)
        .into_par_iter()
        .map(|i| {
            let psi = haar_state_with(d, &mut seed::rng_for(seed, i as u64));
            usize::from(psi.amplitudes()[0].norm_sqr() >= 0.5)
        })
        .sum();
    let analytic = 0.5f64.powi(d as i32 - 1);
    let bound = 8.0 * (-(d as f64) / 600.0).exp();
    Ok(TailReport {
        d,
        samples,
        fraction: hits as f64 / samples as f64,
        analytic,
        stderr: (analytic * (1.0 - analytic) / samples as f64).sqrt(),
        bound,
        bound_vacuous: bound >= 1.0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevyReport {
    pub m: usize,
    pub samples: usize,
    /// Sample mean of `f(psi) = |<0|_1 psi>|^2`.
    pub mean_f: f64,
    pub stderr_f: f64,
    /// `18 sqrt(m) / 2^{m/2}`.
    pub delta: f64,
    /// Fraction of samples with `|f - 1/2| >= delta`.
    pub empirical_tail: f64,
    /// `4 exp(-2^m delta^2 / (18 pi^3))`.
    pub bound: f64,
    pub bound_vacuous: bool,
}

pub fn levy_concentration_probe(m: usize, samples: usize, seed: u64) -> Result<LevyReport> {
    if m == 0 || samples < 2 {
        return config("concentration probe needs m >= 1 and samples >= 2");
    }
    check_state_dim(checked_pow(2, m), "concentration state")?;
    let dim = 1usize << m;
    let fs: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let psi = haar_state_with(dim, &mut seed::rng_for(seed, i as u64));
            psi.amplitudes()[..dim / 2].iter().map(|a| a.norm_sqr()).sum()
        })
        .collect();
    let (mean_f, stderr_f) = mean_and_stderr(&fs);
    let delta = 18.0 * (m as f64).sqrt() / 2f64.powf(m as f64 / 2.0);
    let tail = fs.iter().filter(|&&f| (f - 0.5).abs() >= delta).count() as f64 / samples as f64;
    let pi3 = std::f64::consts::PI.powi(3);
    let bound = 4.0 * (-(dim as f64) * delta * delta / (18.0 * pi3)).exp();
    Ok(LevyReport {
        m,
        samples,
        mean_f,
        stderr_f,
        delta,
        empirical_tail: tail,
        bound,
        bound_vacuous: bound >= 1.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::haar_state;
    use crate::qmath::layout::permute_matrix;
    use crate::qmath::linalg::{max_abs_diff, trace};

    fn cfg(m: usize, n: usize, c: usize, ell: usize) -> AttackConfig {
        AttackConfig { m, n, c, ell, order_seed: 1, trials: 10 }
    }

    #[test]
    fn projector_accepts_matching_pair() {
        let cf = cfg(2, 2, 1, 1);
        let key = PauliKey::from_index(2, 1, 3).unwrap();
        let p = attack_projector(&key, &cf).unwrap();
        assert!(p.idempotence_defect() < 1e-9);
        let psi = haar_state(4, 3);
        let v = paired_register(&key.act(&psi), &psi, 1);
        let acc = (v.to_vector().adjoint() * p.matrix() * v.to_vector())[(0, 0)].re;
        assert!((acc - 1.0).abs() < 1e-12);
    }

    #[test]
    fn projector_half_on_orthogonal_pair() {
        let cf = cfg(2, 2, 1, 1);
        let key = PauliKey::from_index(2, 1, 0).unwrap();
        let p = attack_projector(&key, &cf).unwrap();
        let v = paired_register(&StateVector::basis(4, 0), &StateVector::basis(4, 1), 1);
        let acc = (v.to_vector().adjoint() * p.matrix() * v.to_vector())[(0, 0)].re;
        assert!((acc - 0.5).abs() < 1e-12);
    }

    #[test]
    fn inverse_pad_undoes_pad() {
        let target = PadTarget { m: 3, s: 2 };
        let psi = haar_state(8, 1);
        for k in 0..16 {
            let mut v = psi.amplitudes().to_vec();
            target.apply(k, false, &mut v, 0, 3);
            target.apply(k, true, &mut v, 0, 3);
            for (a, b) in v.iter().zip(psi.amplitudes()) {
                assert!((a - b).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn projector_invariant_under_pair_relabeling() {
        let cf = cfg(1, 2, 2, 2);
        let key = PauliKey::from_index(1, 1, 2).unwrap();
        let p = attack_projector(&key, &cf).unwrap();
        assert!(p.idempotence_defect() < 1e-9);
        let swapped = permute_matrix(p.matrix(), &[2, 2, 2, 2], &[2, 3, 0, 1]);
        assert!(max_abs_diff(&swapped, p.matrix()) < 1e-12);
    }

    #[test]
    fn single_key_in_range_accepts() {
        let cf = cfg(1, 0, 1, 1);
        let psi = haar_state(2, 5);
        let rho = paired_register(&psi, &psi, 1).density();
        let out = sequential_or_test(&rho, &cf, 0).unwrap();
        assert!((out.accept_probability - 1.0).abs() < 1e-12);
    }

    #[test]
    fn no_overlap_never_accepts() {
        let zero = HermitianOp::new(CMatrix::zeros(4, 4)).unwrap();
        let rho = haar_state(4, 1).density();
        let out = sequential_or_dense(&rho, &[zero.clone(), zero], &[1, 0], DEFAULT_PRUNE).unwrap();
        assert!(out.accept_probability.abs() < 1e-15);
        assert!((out.rejected.trace_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn commuting_projectors_follow_inclusion_exclusion() {
        let diag = |d: &[f64]| {
            let mut m = CMatrix::zeros(4, 4);
            for (i, &v) in d.iter().enumerate() {
                m[(i, i)] = Complex64::new(v, 0.0);
            }
            HermitianOp::new(m).unwrap()
        };
        let p1 = diag(&[1.0, 1.0, 0.0, 0.0]);
        let p2 = diag(&[1.0, 0.0, 1.0, 0.0]);
        let rho = haar_state(4, 8).density();
        let out = sequential_or_dense(&rho, &[p1.clone(), p2.clone()], &[0, 1], DEFAULT_PRUNE).unwrap();
        let union = p1.matrix() + p2.matrix() - p1.matrix() * p2.matrix();
        let expected = trace(&(union * rho.matrix())).re;
        assert!((out.accept_probability - expected).abs() < 1e-12);
    }

    #[test]
    fn vector_and_dense_sequential_tests_agree() {
        let cf = cfg(2, 2, 1, 3);
        let target = PadTarget { m: 2, s: 1 };
        let psi = haar_state(4, 2);
        let phi = haar_state(4, 3);
        let v = paired_register(&phi, &psi, 1);
        let order = key_order(4, cf.order_seed, 5);
        let a = sequential_or_vector(&target, &cf, v.amplitudes(), &order, DEFAULT_PRUNE);
        let b = sequential_or_test(&v.density(), &cf, 5).unwrap().accept_probability;
        assert!((a - b).abs() < 1e-12);
        let c2 = sequential_or_vector(&target, &cf, v.amplitudes(), &order, 1e-15);
        assert!((a - c2).abs() < 1e-9);
    }

    #[test]
    fn true_key_first_accepts_with_certainty() {
        let cf = cfg(2, 2, 1, 1);
        let target = PadTarget { m: 2, s: 1 };
        let psi = haar_state(4, 9);
        let key = PauliKey::from_index(2, 1, 2).unwrap();
        let v = paired_register(&key.act(&psi), &psi, 1);
        let acc = sequential_or_vector(&target, &cf, v.amplitudes(), &[2, 0, 1, 3], DEFAULT_PRUNE);
        assert!((acc - 1.0).abs() < 1e-12);
    }

    #[test]
    fn attack_is_deterministic_and_separates() {
        let cf = AttackConfig { m: 2, n: 2, c: 2, ell: 2, order_seed: 3, trials: 40 };
        let a = run_attack(&cf, 1).unwrap();
        let b = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| run_attack(&cf, 1).unwrap());
        assert_eq!(a, b);
        assert!(a.accept_rate_pseudorandom >= a.accept_rate_haar);
        assert!(a.epsilon < 1e-9 && (a.case1_floor - 1.0 / 7.0).abs() < 1e-9);
        assert!(a.per_trial_pseudorandom.iter().all(|&p| p >= 1.0 / 7.0));
    }

    #[test]
    fn longer_repetition_never_helps_random_candidates() {
        let mut prev: Option<(f64, f64)> = None;
        for ell in [1, 2, 4] {
            let r = run_attack(&AttackConfig { m: 2, n: 2, c: 2, ell, order_seed: 0, trials: 60 }, 4).unwrap();
            if let Some((p, s)) = prev {
                assert!(r.accept_rate_haar <= p + 2.0 * s.max(r.stderr_haar));
            }
            prev = Some((r.accept_rate_haar, r.stderr_haar));
        }
    }

    #[test]
    fn overlap_tail_small_dims() {
        let t = haar_overlap_tail(2, 20_000, 1).unwrap();
        assert!(t.bound_vacuous);
        assert!((t.fraction - 0.5).abs() < 0.02);
        let mut prev = 1.0;
        for d in [2, 4, 8, 16] {
            let t = haar_overlap_tail(d, 20_000, 2).unwrap();
            assert!(t.fraction <= prev);
            prev = t.fraction;
        }
    }

    #[test]
    fn levy_probe_mean_and_trend() {
        let r = levy_concentration_probe(4, 10_000, 3).unwrap();
        assert!((r.mean_f - 0.5).abs() < 3.0 * r.stderr_f + 1e-12);
        let mut prev = 1.0;
        for m in [4, 6, 8] {
            let r = levy_concentration_probe(m, 5_000, 3).unwrap();
            assert!(r.empirical_tail <= prev);
            prev = r.empirical_tail;
        }
    }

    #[test]
    fn config_validation() {
        assert!(cfg(3, 2, 2, 8).validate().is_ok());
        assert!(cfg(3, 8, 2, 8).validate().is_err());
        assert!(cfg(3, 2, 2, 0).validate().is_err());
        assert_eq!(cfg(3, 2, 2, 8).effective_repetitions(), 2);
    }
}
