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

//! Partial one-time-pad pseudorandom states and the gap checks built on them.
//!
//! The pad always sits on subsystems `0..s` of the first copy. Families used
//! by the stretching check act on the last `m - 1` qubits of an `m`-qubit
//! state, i.e. qubits `1..m` of the first copy.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{config, Error, Result};
use crate::gap::{GapReport, Mode};
use crate::moments::{haar_moment, mc_average, EnsembleSpec, MCAverage, Sample, BOOTSTRAP_RESAMPLES};
use crate::qmath::cap::{check_operator_dim, checked_pow};
use crate::qmath::layout::{apply_local, conjugate_local, embed_maximally_mixed, partial_trace_matrix};
use crate::qmath::linalg::{c, hermitian_eigenvalues, kron, max_abs_diff, trace, trace_distance, CMatrix, ZERO};
use crate::qmath::{gaussian_hermitian_with, haar_state_with, DensityMatrix, HermitianOp, StateVector, STRUCT_TOL};

/// Key `(a, b)` of the pad `X^a Z^b` on the first `s` of `m` qubits.
///
/// Bit `s - 1 - j` of `a` (resp. `b`) drives the `X` (resp. `Z`) on pad qubit
/// `j`, so the key strings read in qubit order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliKey {
    pub m: usize,
    pub s: usize,
    pub a: u64,
    pub b: u64,
}

impl PauliKey {
    pub fn new(m: usize, s: usize, a: u64, b: u64) -> Result<Self> {
        if s > m {
            return config(format!("pad width {s} exceeds {m} qubits"));
        }
        if s > 31 {
            return config("pad width above 31 qubits is not supported");
        }
        let bound = 1u64 << s;
        if a >= bound || b >= bound {
            return config(format!("key strings must have {s} bits"));
        }
        Ok(Self { m, s, a, b })
    }

    /// Number of keys for a pad of width `s`.
    pub fn count(s: usize) -> usize {
        1usize << (2 * s)
    }

    /// Key with `a = k >> s` and `b = k mod 2^s`.
    pub fn from_index(m: usize, s: usize, k: usize) -> Result<Self> {
        if k >= Self::count(s) {
            return config(format!("key index {k} out of range for pad width {s}"));
        }
        Self::new(m, s, (k >> s) as u64, (k & ((1 << s) - 1)) as u64)
    }

    pub fn index(&self) -> usize {
        ((self.a as usize) << self.s) | self.b as usize
    }

    /// Key length in bits.
    pub fn n(&self) -> usize {
        2 * self.s
    }

    /// All keys for `(m, s)` in index order.
    pub fn all(m: usize, s: usize) -> Result<Vec<Self>> {
        (0..Self::count(s)).map(|k| Self::from_index(m, s, k)).collect()
    }

    fn shift(&self, offset: usize, total: usize) -> usize {
        total - offset - self.s
    }

    /// `X^a Z^b` on qubits `offset..offset + s` of a `total`-qubit vector:
    /// `(X^a Z^b psi)(x) = (-1)^{b . (x xor a)} psi(x xor a)` on the pad bits.
    pub fn apply(&self, amps: &mut [Complex64], offset: usize, total: usize) {
        assert!(offset + self.s <= total, "pad does not fit the register");
        assert_eq!(amps.len(), 1usize << total, "vector is not on {total} qubits");
        let shift = self.shift(offset, total);
        let flip = (self.a as usize) << shift;
        let phase = (self.b as usize) << shift;
        if self.b != 0 {
            for (x, v) in amps.iter_mut().enumerate() {
                if (x & phase).count_ones() % 2 == 1 {
                    *v = -*v;
                }
            }
        }
        if self.a != 0 {
            for x in 0..amps.len() {
                let y = x ^ flip;
                if x < y {
                    amps.swap(x, y);
                }
            }
        }
    }

    /// Dense `2^m` matrix of `X^a Z^b (x) I`.
    pub fn unitary(&self) -> CMatrix {
        let dim = 1usize << self.m;
        let shift = self.shift(0, self.m);
        let mut u = CMatrix::zeros(dim, dim);
        for y in 0..dim {
            let sign = if (y & ((self.b as usize) << shift)).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            u[(y ^ ((self.a as usize) << shift), y)] = c(sign, 0.0);
        }
        u
    }

    /// Applies the pad to a pure state on `m` qubits.
    pub fn act(&self, psi: &StateVector) -> StateVector {
        let mut amps = psi.amplitudes().to_vec();
        self.apply(&mut amps, 0, self.m);
        StateVector::from_normalized(amps).expect("pad is unitary")
    }
}

fn qubit_count(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::Config(format!("dimension {dim} is not a qubit register")));
    }
    Ok(dim.trailing_zeros() as usize)
}

/// Closed-form average of `P rho P^dagger` over all Paulis: `tr(rho) I / 2^s`.
pub fn pauli_twirl(rho: &DensityMatrix) -> Result<DensityMatrix> {
    let dim = rho.dim();
    qubit_count(dim)?;
    let scale = trace(rho.matrix()).re / dim as f64;
    DensityMatrix::with_mass(CMatrix::identity(dim, dim) * c(scale, 0.0), rho.trace_mass())
}

/// Pauli twirl by explicit enumeration of all `4^s` Pauli strings.
pub fn pauli_twirl_bruteforce(rho: &DensityMatrix) -> Result<DensityMatrix> {
    let s = qubit_count(rho.dim())?;
    pad_twirl_bruteforce(rho.matrix(), s, s)
}

/// `E_k U_k rho U_k^dagger = I / 2^s (x) tr_{first s}(rho)` for an operator on
/// `total` qubits whose first `s` qubits are padded.
pub fn pad_twirl_matrix(rho: &CMatrix, total: usize, s: usize) -> CMatrix {
    if s == 0 {
        return rho.clone();
    }
    let dims = vec![2; total];
    let pad: Vec<usize> = (0..s).collect();
    let keep: Vec<usize> = (s..total).collect();
    if keep.is_empty() {
        let dim = rho.nrows();
        return CMatrix::identity(dim, dim) * c(trace(rho).re / dim as f64, 0.0);
    }
    let rest = partial_trace_matrix(rho, &dims, &keep);
    embed_maximally_mixed(&rest, &dims, &pad)
}

/// The pad-twirl channel on an `m`-qubit operator.
pub fn pad_twirl_channel(rho: &DensityMatrix, m: usize, s: usize) -> Result<DensityMatrix> {
    if rho.dim() != 1usize << m {
        return config(format!("operator of dimension {} is not on {m} qubits", rho.dim()));
    }
    if s > m {
        return config(format!("pad width {s} exceeds {m} qubits"));
    }
    DensityMatrix::with_mass(pad_twirl_matrix(rho.matrix(), m, s), rho.trace_mass())
}

/// Key-enumeration counterpart of [`pad_twirl_matrix`] on an `m`-qubit
/// operator, the pad covering its first `s` qubits.
pub fn pad_twirl_bruteforce(rho: &CMatrix, m: usize, s: usize) -> Result<DensityMatrix> {
    let keys = PauliKey::all(m, s)?;
    let mut acc = CMatrix::zeros(rho.nrows(), rho.ncols());
    for k in &keys {
        let u = k.unitary();
        acc += &u * rho * u.adjoint();
    }
    DensityMatrix::new(acc / c(keys.len() as f64, 0.0))
}

/// Exact `E_k E_psi (U_k psi U_k^dagger) (x) psi^{(x) r-1}`.
pub fn prs_ensemble_state(spec: &EnsembleSpec) -> Result<DensityMatrix> {
    spec.validate()?;
    let moment = haar_moment(1 << spec.m, spec.r)?;
    let out = pad_twirl_matrix(moment.matrix(), spec.m * spec.r, spec.pad_qubits());
    DensityMatrix::new(out)
}

/// Monte Carlo counterpart of [`prs_ensemble_state`]: each sample draws a
/// Haar state and a uniform key.
pub fn prs_ensemble_mc(spec: &EnsembleSpec) -> Result<MCAverage> {
    spec.validate()?;
    let (m, s, r) = (spec.m, spec.pad_qubits(), spec.r);
    mc_average(spec.joint_dim(), spec.samples, spec.seed, move |rng| {
        let psi = haar_state_with(1 << m, rng);
        let k = rng.random_range(0..PauliKey::count(s));
        let key = PauliKey::from_index(m, s, k).expect("key index in range");
        let mut out = key.act(&psi);
        for _ in 1..r {
            out = out.kron(&psi);
        }
        Sample::Pure(out)
    })
}

/// `I / 2^m (x) E_psi psi^{(x) r-1}`.
pub fn ideal_ensemble_state(m: usize, r: usize) -> Result<DensityMatrix> {
    if m == 0 || r == 0 {
        return config("ideal ensemble needs m >= 1 and r >= 1");
    }
    check_operator_dim(checked_pow(2, m * r), "ideal ensemble operator")?;
    let rest = haar_moment(1 << m, r - 1)?;
    Ok(DensityMatrix::maximally_mixed(1 << m).kron(&rest))
}

/// `2 r^2 / 2^{m/2}`, the bound for a pad on half the qubits.
pub fn half_pad_bound(m: usize, r: usize) -> f64 {
    2.0 * (r * r) as f64 / 2f64.powf(m as f64 / 2.0)
}

/// `(2 r^2 + 800 r m sqrt(m)) 5^{0.1 m} / 2^{0.45 m}`, the bound for a pad
/// on roughly 45% of the qubits.
pub fn partial_pad_bound(m: usize, r: usize) -> f64 {
    let (m, r) = (m as f64, r as f64);
    (2.0 * r * r + 800.0 * r * m * m.sqrt()) * 5f64.powf(0.1 * m) / 2f64.powf(0.45 * m)
}

/// Bound value, tag and applicability for a pad of width `s` on `m` qubits.
pub fn select_bound(m: usize, s: usize, r: usize) -> (f64, &'static str, bool) {
    if 2 * s >= m {
        // A wider pad is a further channel applied to the half pad, so the
        // half-pad bound still applies.
        let applicable = m.is_multiple_of(2) && (r as f64) <= 2f64.powf(m as f64 / 2.0);
        (half_pad_bound(m, r), "Thm4.5", applicable)
    } else {
        (partial_pad_bound(m, r), "Cor4.9", true)
    }
}

/// Pad width used when the caller asks for the asymptotic fraction at desk
/// scale: `max(1, floor(0.45 m))`.
pub fn asymptotic_pad(m: usize) -> usize {
    ((0.45 * m as f64).floor() as usize).max(1).min(m)
}

/// Trace distance between the pseudorandom and ideal ensembles.
pub fn prs_gap(spec: &EnsembleSpec) -> Result<GapReport> {
    spec.validate()?;
    let ideal = ideal_ensemble_state(spec.m, spec.r)?;
    let (lhs, err) = match spec.mode {
        Mode::Exact => (trace_distance(prs_ensemble_state(spec)?.matrix(), ideal.matrix())?, None),
        Mode::MonteCarlo => {
            let avg = prs_ensemble_mc(spec)?;
            let (d, e) = avg.distance_to(ideal.matrix())?;
            (d, Some(e))
        }
    };
    let (bound, id, applicable) = select_bound(spec.m, spec.pad_qubits(), spec.r);
    Ok(GapReport::new(lhs, bound, id, applicable, spec.mode, err))
}

/// `(|0>|psi_1> + |1>|psi_2>) / sqrt(2)`.
pub fn half_split_state(psi1: &StateVector, psi2: &StateVector) -> StateVector {
    assert_eq!(psi1.dim(), psi2.dim(), "halves must have equal dimension");
    let h = 1.0 / 2f64.sqrt();
    let amps = psi1
        .amplitudes()
        .iter()
        .chain(psi2.amplitudes())
        .map(|a| a * h)
        .collect();
    StateVector::new(amps).expect("split state is nonzero")
}

/// Monte Carlo `E psi'^{(x) r}` over independent Haar halves, against the
/// exact Haar moment with the bound `80 r sqrt(m) / 2^{m/2}`.
pub fn half_split_moment(m: usize, r: usize, samples: usize, seed: u64) -> Result<(MCAverage, GapReport)> {
    if m < 2 || r == 0 {
        return config("half split needs m >= 2 and r >= 1");
    }
    check_operator_dim(checked_pow(2, m * r), "half-split moment")?;
    let half = 1usize << (m - 1);
    let avg = mc_average(1 << (m * r), samples, seed, |rng| {
        let a = haar_state_with(half, rng);
        let b = haar_state_with(half, rng);
        Sample::Pure(half_split_state(&a, &b).tensor_power(r))
    })?;
    let exact = haar_moment(1 << m, r)?;
    let (lhs, err) = avg.distance_to(exact.matrix())?;
    let bound = 80.0 * r as f64 * (m as f64).sqrt() / 2f64.powf(m as f64 / 2.0);
    let report = GapReport::new(lhs, bound, "Lem4.6", true, Mode::MonteCarlo, Some(err));
    Ok((avg, report))
}

/// `||psi - F(psi)||` where `F` rescales both first-qubit branches to weight
/// one half. Closed form for pure states: `2 sqrt(1 - |<psi|F psi>|^2)` with
/// overlap `(alpha + beta) / sqrt(2)`.
pub fn split_deviation_of(psi: &StateVector) -> f64 {
    let half = psi.dim() / 2;
    let w0: f64 = psi.amplitudes()[..half].iter().map(|a| a.norm_sqr()).sum();
    let w1: f64 = psi.amplitudes()[half..].iter().map(|a| a.norm_sqr()).sum();
    let overlap = (w0.sqrt() + w1.sqrt()) / 2f64.sqrt();
    2.0 * (1.0 - overlap * overlap).max(0.0).sqrt()
}

/// Explicit `F(psi)` for cross-checking the closed form.
pub fn split_fix(psi: &StateVector) -> Result<StateVector> {
    let half = psi.dim() / 2;
    let amps = psi.amplitudes();
    let w0: f64 = amps[..half].iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    let w1: f64 = amps[half..].iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if w0 == 0.0 || w1 == 0.0 {
        return Err(Error::Numeric("a branch of the split is empty".into()));
    }
    let h = 1.0 / 2f64.sqrt();
    let out = amps
        .iter()
        .enumerate()
        .map(|(i, a)| a * (h / if i < half { w0 } else { w1 }))
        .collect();
    StateVector::new(out)
}

/// Monte Carlo estimate of `E_psi ||psi - F(psi)||`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SplitDeviation {
    pub mean: f64,
    pub stderr: f64,
    pub bound: f64,
    pub pass: bool,
    pub samples: usize,
}

pub fn split_deviation(m: usize, samples: usize, seed: u64) -> Result<SplitDeviation> {
    if m < 1 || samples < 2 {
        return config("split deviation needs m >= 1 and samples >= 2");
    }
    crate::qmath::check_state_dim(checked_pow(2, m), "split deviation state")?;
    use rayon::prelude::*;
    let vals: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| split_deviation_of(&haar_state_with(1 << m, &mut crate::qmath::seed::rng_for(seed, i as u64))))
        .collect();
    let n = samples as f64;
    let mean = vals.iter().sum::<f64>() / n;
    let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    let bound = 80.0 * (m as f64).sqrt() / 2f64.powf(m as f64 / 2.0);
    Ok(SplitDeviation { mean, stderr: (var / n).sqrt(), bound, pass: mean <= bound, samples })
}

/// Outcome of the four-branch block-norm test on an operator whose first
/// subsystem is a qubit.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockNormCheck {
    /// Trace norms of `<a|A|a>` for `a` in `0, 1, +, +i`.
    pub branch_norms: [f64; 4],
    pub norm: f64,
    pub eps: f64,
    pub holds_hypothesis: bool,
    pub holds_conclusion: bool,
}

pub fn block_norm_check(a: &HermitianOp, eps: f64) -> Result<BlockNormCheck> {
    let dim = a.dim();
    if dim < 2 || !dim.is_multiple_of(2) {
        return config("block norm check needs a leading qubit");
    }
    let h = dim / 2;
    let m = a.matrix();
    let blk = |i: usize, j: usize| m.view((i * h, j * h), (h, h)).into_owned();
    let (a00, a01, a10, a11) = (blk(0, 0), blk(0, 1), blk(1, 0), blk(1, 1));
    let half = c(0.5, 0.0);
    let i = c(0.0, 1.0);
    let branches = [
        a00.clone(),
        a11.clone(),
        (&a00 + &a01 + &a10 + &a11) * half,
        (&a00 + &a01 * i - &a10 * i + &a11) * half,
    ];
    let abs_sum = |x: &CMatrix| hermitian_eigenvalues(x).iter().map(|v| v.abs()).sum::<f64>();
    let mut branch_norms = [0.0; 4];
    for (n, b) in branch_norms.iter_mut().zip(&branches) {
        *n = abs_sum(b);
    }
    let norm = abs_sum(m);
    Ok(BlockNormCheck {
        branch_norms,
        norm,
        eps,
        holds_hypothesis: branch_norms.iter().all(|&v| v < eps),
        holds_conclusion: norm < 10.0 * eps,
    })
}

/// Block-norm check over random GUE operators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockNormSurvey {
    pub qubits: usize,
    pub trials: usize,
    /// Trials whose four branch norms were all below `eps`.
    pub hypothesis_hits: usize,
    /// Hypothesis hits with `||A|| >= 10 eps`.
    pub counterexamples: usize,
    /// Largest `||A|| / max_branch` seen.
    pub max_ratio: f64,
}

/// Samples `trials` GUE operators on `qubits` qubits. With `eps = None`
/// each trial draws `eps = max_branch * u`, `u` uniform in `[0.5, 2)`, so
/// that roughly half the trials meet the hypothesis.
pub fn block_norm_survey(qubits: usize, trials: usize, eps: Option<f64>, seed: u64) -> Result<BlockNormSurvey> {
    if qubits == 0 || trials == 0 {
        return config("block norm survey needs qubits >= 1 and trials >= 1");
    }
    check_operator_dim(checked_pow(2, qubits), "block norm operator")?;
    use rayon::prelude::*;
    let checks: Vec<(BlockNormCheck, f64)> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = crate::qmath::seed::rng_for(seed, i as u64);
            let a = HermitianOp::new(gaussian_hermitian_with(1 << qubits, &mut rng))?;
            let probe = block_norm_check(&a, 0.0)?;
            let top = probe.branch_norms.iter().cloned().fold(0.0, f64::max);
            let e = eps.unwrap_or_else(|| top * rng.random_range(0.5..2.0));
            Ok((block_norm_check(&a, e)?, probe.norm / top))
        })
        .collect::<Result<_>>()?;
    let hits: Vec<&BlockNormCheck> = checks.iter().map(|(c, _)| c).filter(|c| c.holds_hypothesis).collect();
    Ok(BlockNormSurvey {
        qubits,
        trials,
        hypothesis_hits: hits.len(),
        counterexamples: hits.iter().filter(|c| !c.holds_conclusion).count(),
        max_ratio: checks.iter().map(|(_, r)| *r).fold(0.0, f64::max),
    })
}

/// A finite family of unitaries on a fixed number of qubits, indexed by key.
pub trait UnitaryFamily: Sync {
    fn qubits(&self) -> usize;
    fn len(&self) -> usize;
    fn unitary(&self, key: usize) -> CMatrix;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `E_k U_k M U_k^dagger` with the family acting on the qubit positions
    /// `targets` of an operator on qubits `dims`.
    fn average_conjugation(&self, m: &CMatrix, dims: &[usize], targets: &[usize]) -> CMatrix {
        let mut acc = CMatrix::zeros(m.nrows(), m.ncols());
        for k in 0..self.len() {
            acc += conjugate_local(m, dims, targets, &self.unitary(k));
        }
        acc / c(self.len() as f64, 0.0)
    }
}

/// Pauli pads on the first `pad` of `qubits` qubits.
#[derive(Debug, Clone, Copy)]
pub struct QotpFamily {
    pub qubits: usize,
    pub pad: usize,
}

impl UnitaryFamily for QotpFamily {
    fn qubits(&self) -> usize {
        self.qubits
    }

    fn len(&self) -> usize {
        PauliKey::count(self.pad)
    }

    fn unitary(&self, key: usize) -> CMatrix {
        PauliKey::from_index(self.qubits, self.pad, key).expect("key in range").unitary()
    }

    fn average_conjugation(&self, m: &CMatrix, dims: &[usize], targets: &[usize]) -> CMatrix {
        if self.pad == 0 {
            return m.clone();
        }
        let pad = &targets[..self.pad];
        let keep: Vec<usize> = (0..dims.len()).filter(|p| !pad.contains(p)).collect();
        if keep.is_empty() {
            let dim = m.nrows();
            return CMatrix::identity(dim, dim) * c(trace(m).re / dim as f64, 0.0);
        }
        embed_maximally_mixed(&partial_trace_matrix(m, dims, &keep), dims, pad)
    }
}

/// The single-element family `{I}`.
#[derive(Debug, Clone, Copy)]
pub struct IdentityFamily {
    pub qubits: usize,
}

impl UnitaryFamily for IdentityFamily {
    fn qubits(&self) -> usize {
        self.qubits
    }

    fn len(&self) -> usize {
        1
    }

    fn unitary(&self, _key: usize) -> CMatrix {
        CMatrix::identity(1 << self.qubits, 1 << self.qubits)
    }

    fn average_conjugation(&self, m: &CMatrix, _dims: &[usize], _targets: &[usize]) -> CMatrix {
        m.clone()
    }
}

/// A family given by explicit matrices.
#[derive(Debug, Clone)]
pub struct ExplicitFamily {
    qubits: usize,
    unitaries: Vec<CMatrix>,
}

impl ExplicitFamily {
    pub fn new(qubits: usize, unitaries: Vec<CMatrix>) -> Result<Self> {
        if unitaries.is_empty() {
            return config("unitary family is empty");
        }
        let dim = 1usize << qubits;
        for u in &unitaries {
            if u.nrows() != dim || u.ncols() != dim {
                return config(format!("family member is not a {dim}x{dim} matrix"));
            }
            let defect = max_abs_diff(&(u.adjoint() * u), &CMatrix::identity(dim, dim));
            if defect > STRUCT_TOL {
                return Err(Error::Numeric(format!("family member is not unitary (defect {defect:.3e})")));
            }
        }
        Ok(Self { qubits, unitaries })
    }
}

impl UnitaryFamily for ExplicitFamily {
    fn qubits(&self) -> usize {
        self.qubits
    }

    fn len(&self) -> usize {
        self.unitaries.len()
    }

    fn unitary(&self, key: usize) -> CMatrix {
        self.unitaries[key].clone()
    }
}

/// Pad on `ceil((m - 1) / 2)` of the last `m - 1` qubits.
pub fn default_family(m: usize) -> QotpFamily {
    QotpFamily { qubits: m - 1, pad: m / 2 }
}

/// Result of the stretching check.
#[derive(Debug, Clone, PartialEq)]
pub struct StretchReport {
    /// `lhs_distance` is the `m`-qubit gap, `bound_value` the right-hand side.
    pub gap: GapReport,
    /// Gap of the family on `m - 1` qubits.
    pub rhs_gap: f64,
    /// `800 r sqrt(m) / 2^{m/2}`.
    pub additive: f64,
}

impl StretchReport {
    pub fn margin(&self) -> f64 {
        self.gap.margin()
    }
}

fn family_gap_exact(
    family: &dyn UnitaryFamily,
    qubits: usize,
    r: usize,
    targets: &[usize],
) -> Result<f64> {
    let total = qubits * r;
    check_operator_dim(checked_pow(2, total), "family gap operator")?;
    let dims = vec![2; total];
    let moment = haar_moment(1 << qubits, r)?;
    let real = family.average_conjugation(moment.matrix(), &dims, targets);
    let ideal = ideal_ensemble_state(qubits, r)?;
    trace_distance(&real, ideal.matrix())
}

fn family_gap_mc(
    family: &dyn UnitaryFamily,
    qubits: usize,
    r: usize,
    targets: &[usize],
    samples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    let total = qubits * r;
    check_operator_dim(checked_pow(2, total), "family gap operator")?;
    let unitaries: Vec<CMatrix> = (0..family.len()).map(|k| family.unitary(k)).collect();
    let dims = vec![2; qubits];
    let avg = mc_average(1 << total, samples, seed, |rng| {
        let psi = haar_state_with(1 << qubits, rng);
        let k = rng.random_range(0..unitaries.len());
        let mut first = psi.amplitudes().to_vec();
        apply_local(&mut first, &dims, targets, &unitaries[k]);
        let mut out = StateVector::from_normalized(first).expect("unitary action");
        for _ in 1..r {
            out = out.kron(&psi);
        }
        Sample::Pure(out)
    })?;
    let ideal = ideal_ensemble_state(qubits, r)?;
    let d = trace_distance(avg.mean.matrix(), ideal.matrix())?;
    Ok((d, avg.bootstrap_trace_error(BOOTSTRAP_RESAMPLES)?))
}

/// Compares the `m`-qubit gap of a family acting on the last `m - 1` qubits
/// with five times its own gap on `m - 1` qubits plus `800 r sqrt(m) / 2^{m/2}`.
pub fn stretch_check(
    m: usize,
    r: usize,
    family: &dyn UnitaryFamily,
    mode: Mode,
    samples: usize,
    seed: u64,
) -> Result<StretchReport> {
    if m < 2 || r == 0 {
        return config("stretch check needs m >= 2 and r >= 1");
    }
    if family.qubits() != m - 1 {
        return config(format!(
            "family acts on {} qubits, expected m - 1 = {}",
            family.qubits(),
            m - 1
        ));
    }
    if family.is_empty() {
        return config("unitary family is empty");
    }
    let lhs_targets: Vec<usize> = (1..m).collect();
    let rhs_targets: Vec<usize> = (0..m - 1).collect();
    let (lhs, rhs_gap, err) = match mode {
        Mode::Exact => (
            family_gap_exact(family, m, r, &lhs_targets)?,
            family_gap_exact(family, m - 1, r, &rhs_targets)?,
            None,
        ),
        Mode::MonteCarlo => {
            let (l, le) = family_gap_mc(family, m, r, &lhs_targets, samples, seed)?;
            let rhs_seed = crate::qmath::seed::derive_tagged(seed, "stretch-rhs", 0);
            let (g, ge) = family_gap_mc(family, m - 1, r, &rhs_targets, samples, rhs_seed)?;
            (l, g, Some(le + 5.0 * ge))
        }
    };
    let additive = 800.0 * r as f64 * (m as f64).sqrt() / 2f64.powf(m as f64 / 2.0);
    let bound = 5.0 * rhs_gap + additive;
    Ok(StretchReport { gap: GapReport::new(lhs, bound, "Thm4.8", true, mode, err), rhs_gap, additive })
}

/// Lower-level exact pieces exposed for oracle tests.
pub fn key_average_state(psi: &StateVector, s: usize) -> Result<DensityMatrix> {
    let m = qubit_count(psi.dim())?;
    let keys = PauliKey::all(m, s)?;
    let mut acc = CMatrix::zeros(psi.dim(), psi.dim());
    for k in keys.iter() {
        acc += k.act(psi).outer();
    }
    DensityMatrix::new(acc / c(keys.len() as f64, 0.0))
}

#[allow(dead_code)]
fn pauli_string(bits_x: &[bool], bits_z: &[bool]) -> CMatrix {
    let x = CMatrix::from_row_slice(2, 2, &[ZERO, c(1.0, 0.0), c(1.0, 0.0), ZERO]);
    let z = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), ZERO, ZERO, c(-1.0, 0.0)]);
    let id = CMatrix::identity(2, 2);
    let mut out = CMatrix::identity(1, 1);
    for (&bx, &bz) in bits_x.iter().zip(bits_z) {
        let xf = if bx { &x } else { &id };
        let zf = if bz { &z } else { &id };
        out = kron(&out, &(xf * zf));
    }
    out
}
