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

//! Swap-test bit commitment from the common Haar state: commit states,
//! hiding, sum-binding and the extractor-based Real/Ideal experiments.
//!
//! Register conventions. One copy of a commitment lives on `(R, C)` with `R`
//! the more significant factor. `R` has `max(lambda, 2s)` qubits: the key
//! `(a, b)` occupies its leading `2s` qubits and the rest stay `|0>`. A
//! sender state for `copies` parallel commitments is ordered
//! `(R_1, C_1, ..., R_c, C_c, W)` where `W` is the committer's private work
//! register (dimension 1 when absent). The receiver's fresh copies follow in
//! the same per-copy order.

use serde::{Deserialize, Serialize};

use crate::error::{config, Error, Result};
use crate::gap::{GapReport, Mode};
use crate::moments::haar_moment;
use crate::prs::{select_bound, PauliKey};
use crate::qmath::cap::{check_operator_dim, check_state_dim, checked_pow};
use crate::qmath::layout::{
    apply_local, conjugate_local, partial_trace_matrix, partial_trace_vector, symmetrize_pair,
};
use crate::qmath::linalg::{c, hermitian_eigen, kron, trace, trace_distance, trace_norm_matrix, CMatrix, ZERO};
use crate::qmath::{haar_state, DensityMatrix, HermitianOp, RegisterLayout, StateVector};

/// Eigenvalues above this count toward the support of a reduced state.
pub const SUPPORT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommitmentParams {
    /// Qubits of the common Haar state and of each `C` register.
    pub lambda: usize,
    /// Pad width in qubits.
    pub s: usize,
    /// Parallel repetitions of the base commitment.
    pub copies: usize,
    /// Copies of the common state held by the adversary in the hiding game.
    pub t: usize,
}

impl CommitmentParams {
    pub fn new(lambda: usize, s: usize, copies: usize, t: usize) -> Result<Self> {
        let p = Self { lambda, s, copies, t };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.lambda == 0 {
            return config("commitment needs lambda >= 1");
        }
        if self.s > self.lambda {
            return config(format!("pad width {} exceeds lambda = {}", self.s, self.lambda));
        }
        if self.copies == 0 {
            return config("commitment needs at least one copy");
        }
        Ok(())
    }

    pub fn r_qubits(&self) -> usize {
        self.lambda.max(2 * self.s)
    }

    /// Qubits of one `(R, C)` block.
    pub fn block_qubits(&self) -> usize {
        self.r_qubits() + self.lambda
    }

    pub fn block_dim(&self) -> usize {
        1usize << self.block_qubits()
    }
}

/// The sampled common state and the honest commit states built from it.
#[derive(Debug, Clone)]
pub struct CommitmentInstance {
    pub params: CommitmentParams,
    pub psi: StateVector,
    /// `2^{-s} sum_{a,b} |ab||0> X^a Z^b |psi>` on `(R, C)`.
    pub psi_tilde_0: StateVector,
    /// `2^{-lambda/2} sum_x |x||0> |x>` on `(R, C)`.
    pub psi_tilde_1: StateVector,
    pub rho_0: DensityMatrix,
    pub rho_1: DensityMatrix,
}

impl CommitmentInstance {
    pub fn psi_tilde(&self, bit: u8) -> &StateVector {
        if bit == 0 {
            &self.psi_tilde_0
        } else {
            &self.psi_tilde_1
        }
    }

    /// `(R, C)` layout of one block.
    pub fn block_layout(&self) -> RegisterLayout {
        RegisterLayout::new(vec![
            ("R", 1usize << self.params.r_qubits()),
            ("C", 1usize << self.params.lambda),
        ])
        .expect("fixed labels")
    }

    /// Rank of `rho_0`.
    pub fn rank_rho_0(&self) -> usize {
        hermitian_eigen(self.rho_0.matrix()).0.iter().filter(|&&v| v > SUPPORT_TOL).count()
    }
}

/// The isometry `V: C -> (R, C)` with `V|psi> = psi_tilde_0`.
pub fn commit_isometry(params: &CommitmentParams) -> Result<CMatrix> {
    params.validate()?;
    check_operator_dim(checked_pow(2, params.block_qubits()), "commit isometry")?;
    let cdim = 1usize << params.lambda;
    let rshift = params.r_qubits() - 2 * params.s;
    let norm = 1.0 / (1u64 << params.s) as f64;
    let mut v = CMatrix::zeros(params.block_dim(), cdim);
    for key in PauliKey::all(params.lambda, params.s)? {
        let u = key.unitary();
        let r = key.index() << rshift;
        for i in 0..cdim {
            for j in 0..cdim {
                v[(r * cdim + i, j)] += u[(i, j)] * norm;
            }
        }
    }
    Ok(v)
}

pub fn build_commit_states(params: &CommitmentParams, seed: u64) -> Result<CommitmentInstance> {
    params.validate()?;
    check_state_dim(checked_pow(2, params.block_qubits()), "commit state")?;
    let cdim = 1usize << params.lambda;
    let bdim = params.block_dim();
    let psi = haar_state(cdim, seed);
    let rshift = params.r_qubits() - 2 * params.s;

    let norm0 = 1.0 / (1u64 << params.s) as f64;
    let mut amps0 = vec![ZERO; bdim];
    for key in PauliKey::all(params.lambda, params.s)? {
        let r = key.index() << rshift;
        for (i, a) in key.act(&psi).amplitudes().iter().enumerate() {
            amps0[r * cdim + i] = a * norm0;
        }
    }
    let xshift = params.r_qubits() - params.lambda;
    let norm1 = 1.0 / (cdim as f64).sqrt();
    let mut amps1 = vec![ZERO; bdim];
    for x in 0..cdim {
        amps1[(x << xshift) * cdim + x] = c(norm1, 0.0);
    }
    let psi_tilde_0 = StateVector::from_normalized(amps0)?;
    let psi_tilde_1 = StateVector::from_normalized(amps1)?;
    let dims = [1usize << params.r_qubits(), cdim];
    let rho_0 = DensityMatrix::new(partial_trace_vector(psi_tilde_0.amplitudes(), &dims, &[1]))?;
    let rho_1 = DensityMatrix::new(partial_trace_vector(psi_tilde_1.amplitudes(), &dims, &[1]))?;
    Ok(CommitmentInstance { params: *params, psi, psi_tilde_0, psi_tilde_1, rho_0, rho_1 })
}

/// Hiding experiment result.
#[derive(Debug, Clone, PartialEq)]
pub struct HidingReport {
    /// `commit_copies` times the single-copy distance, against the matching
    /// pseudorandomness bound scaled the same way.
    pub gap: GapReport,
    /// `|| E[rho_0 (x) psi^t] - E[rho_1 (x) psi^t] ||`.
    pub per_copy: f64,
    pub commit_copies: usize,
}

/// Exact distance between the committed-0 and committed-1 views of an
/// adversary holding `t` copies of the common state. The committed-0 side is
/// evaluated through the Kraus operators of [`commit_isometry`], independent
/// of the pad-twirl closed form.
pub fn hiding_gap(params: &CommitmentParams, commit_copies: usize) -> Result<HidingReport> {
    params.validate()?;
    if commit_copies == 0 {
        return config("hiding gap needs at least one commitment copy");
    }
    let lambda = params.lambda;
    let r = params.t + 1;
    check_operator_dim(checked_pow(2, lambda * r), "hiding operator")?;
    let cdim = 1usize << lambda;
    let moment = haar_moment(cdim, r)?;
    let v = commit_isometry(params)?;
    let dims = vec![cdim; r];
    let mut zero_side = CMatrix::zeros(moment.dim(), moment.dim());
    for j in 0..(1usize << params.r_qubits()) {
        let kraus = v.rows(j * cdim, cdim).into_owned();
        if kraus.iter().all(|z| *z == ZERO) {
            continue;
        }
        zero_side += conjugate_local(moment.matrix(), &dims, &[0], &kraus);
    }
    let rest = haar_moment(cdim, params.t)?;
    let one_side = kron(&(CMatrix::identity(cdim, cdim) / c(cdim as f64, 0.0)), rest.matrix());
    let per_copy = trace_distance(&zero_side, &one_side)?;
    let (bound, id, applicable) = select_bound(lambda, params.s, r);
    let k = commit_copies as f64;
    Ok(HidingReport {
        gap: GapReport::new(k * per_copy, k * bound, id, applicable, Mode::Exact, None),
        per_copy,
        commit_copies,
    })
}

/// Projector onto the all-accept outcome of `c` pairwise swap tests between
/// parts `A_1..A_c` (dimensions `part_dims`) and `B_1..B_c` of the same
/// dimensions, on the ordering `(A_1..A_c, B_1..B_c)`.
pub fn all_accept_projector(part_dims: &[usize]) -> Result<HermitianOp> {
    let c_parts = part_dims.len();
    if c_parts == 0 {
        return config("swap test needs at least one part");
    }
    let half: usize = part_dims.iter().product();
    check_operator_dim((half as u128) * (half as u128), "swap-test projector")?;
    let dims: Vec<usize> = part_dims.iter().chain(part_dims).copied().collect();
    let dim = half * half;
    let mut out = CMatrix::zeros(dim, dim);
    for x in 0..dim {
        let mut v = vec![ZERO; dim];
        v[x] = c(1.0, 0.0);
        for i in 0..c_parts {
            symmetrize_pair(&mut v, &dims, i, c_parts + i);
        }
        for (y, a) in v.iter().enumerate() {
            out[(y, x)] = *a;
        }
    }
    HermitianOp::new(out)
}

/// Closed-form acceptance of `c` pairwise swap tests on `rho (x) sigma`:
/// `2^{-c} sum_S tr[rho_S sigma_S]`. `rho` may be sub-normalized.
pub fn multi_swap_accept(rho: &DensityMatrix, sigma: &DensityMatrix, layout: &RegisterLayout) -> Result<f64> {
    layout.check_dim(rho.dim())?;
    layout.check_dim(sigma.dim())?;
    let dims = layout.dims();
    let c_parts = dims.len();
    if c_parts > 20 {
        return config("too many swap-test parts");
    }
    let mut total = 0.0;
    for mask in 0u32..(1 << c_parts) {
        let keep: Vec<usize> = (0..c_parts).filter(|i| mask >> i & 1 == 1).collect();
        let term = if keep.is_empty() {
            trace(rho.matrix()).re * trace(sigma.matrix()).re
        } else {
            let a = partial_trace_matrix(rho.matrix(), &dims, &keep);
            let b = partial_trace_matrix(sigma.matrix(), &dims, &keep);
            (a * b).trace().re
        };
        total += term;
    }
    Ok(total / (1u64 << c_parts) as f64)
}

/// The same acceptance by explicit Lüders measurement of the all-accept
/// projector on `rho (x) sigma`.
pub fn swap_test_circuit(rho: &DensityMatrix, sigma: &DensityMatrix, layout: &RegisterLayout) -> Result<f64> {
    layout.check_dim(rho.dim())?;
    layout.check_dim(sigma.dim())?;
    let p = all_accept_projector(&layout.dims())?;
    let joint = rho.kron(sigma);
    Ok(crate::qmath::lueders_update(&joint, &p)?.0)
}

/// `(psi_1 + psi_2) / ||psi_1 + psi_2||`.
fn superpose(a: &StateVector, b: &StateVector) -> Result<StateVector> {
    let amps = a.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| x + y).collect();
    StateVector::new(amps)
}

/// A committer: the joint state it hands over on `(R_i, C_i)_i (x) W`.
#[derive(Debug, Clone)]
pub enum Strategy {
    /// Honest commitment to `bit`.
    Honest { bit: u8 },
    /// Each copy in the normalized superposition of both honest states.
    Superposition,
    /// Arbitrary pure state on the sender registers and a work register of
    /// dimension `work_dim`.
    Custom { state: StateVector, work_dim: usize },
}

impl Strategy {
    pub fn name(&self) -> &'static str {
        match self {
            Strategy::Honest { bit: 0 } => "honest-flip",
            Strategy::Honest { .. } => "honest-one",
            Strategy::Superposition => "superposition",
            Strategy::Custom { .. } => "custom",
        }
    }

    /// Commit-phase state and work dimension.
    pub fn commit_state(&self, inst: &CommitmentInstance) -> Result<(StateVector, usize)> {
        let copies = inst.params.copies;
        check_state_dim(checked_pow(inst.params.block_dim(), copies), "sender state")?;
        match self {
            Strategy::Honest { bit } => Ok((inst.psi_tilde(*bit).tensor_power(copies), 1)),
            Strategy::Superposition => {
                let chi = superpose(&inst.psi_tilde_0, &inst.psi_tilde_1)?;
                Ok((chi.tensor_power(copies), 1))
            }
            Strategy::Custom { state, work_dim } => {
                let expected = inst.params.block_dim().pow(copies as u32) * work_dim;
                if state.dim() != expected || *work_dim == 0 {
                    return config(format!(
                        "custom strategy state has dimension {}, expected {expected}",
                        state.dim()
                    ));
                }
                Ok((state.clone(), *work_dim))
            }
        }
    }
}

/// Purifies a density matrix on the sender registers into a pure state with
/// a work register holding the eigen-index (dimension = rank).
pub fn purify(rho: &DensityMatrix) -> Result<(StateVector, usize)> {
    let (vals, vecs) = hermitian_eigen(rho.matrix());
    let kept: Vec<usize> = (0..vals.len()).filter(|&k| vals[k] > 1e-12).collect();
    if kept.is_empty() {
        return Err(Error::Numeric("cannot purify the zero operator".into()));
    }
    let w = kept.len();
    let dim = rho.dim();
    let mut amps = vec![ZERO; dim * w];
    for (slot, &k) in kept.iter().enumerate() {
        let weight = vals[k].sqrt();
        for i in 0..dim {
            amps[i * w + slot] = vecs[(i, k)] * weight;
        }
    }
    Ok((StateVector::new(amps)?, w))
}

struct RevealFrame {
    dims: Vec<usize>,
    sender_blocks: Vec<usize>,
    receiver_blocks: Vec<usize>,
    work: usize,
}

impl RevealFrame {
    fn new(params: &CommitmentParams, work_dim: usize) -> Self {
        let cpy = params.copies;
        let rdim = 1usize << params.r_qubits();
        let cdim = 1usize << params.lambda;
        let mut dims = Vec::new();
        for _ in 0..cpy {
            dims.push(rdim * cdim);
        }
        dims.push(work_dim);
        for _ in 0..cpy {
            dims.push(rdim * cdim);
        }
        RevealFrame {
            dims,
            sender_blocks: (0..cpy).collect(),
            receiver_blocks: (cpy + 1..2 * cpy + 1).collect(),
            work: cpy,
        }
    }

    /// Splits each block into `(R, C)` for local extractor operations.
    fn fine_dims(&self, params: &CommitmentParams) -> (Vec<usize>, Vec<usize>) {
        let rdim = 1usize << params.r_qubits();
        let cdim = 1usize << params.lambda;
        let mut dims = Vec::new();
        let mut c_pos = Vec::new();
        for (k, &d) in self.dims.iter().enumerate() {
            if k < params.copies {
                dims.push(rdim);
                c_pos.push(dims.len());
                dims.push(cdim);
            } else {
                dims.push(d);
            }
        }
        (dims, c_pos)
    }

    fn apply_verifier(&self, v: &mut [num_complex::Complex64]) {
        for (&s, &r) in self.sender_blocks.iter().zip(&self.receiver_blocks) {
            symmetrize_pair(v, &self.dims, s, r);
        }
    }
}

fn norm_sqr(v: &[num_complex::Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum()
}

fn joint_with_receiver(sender: &StateVector, inst: &CommitmentInstance, bit: u8) -> Result<Vec<num_complex::Complex64>> {
    let copies = inst.params.copies;
    let recv = inst.psi_tilde(bit).tensor_power(copies);
    check_state_dim((sender.dim() as u128) * (recv.dim() as u128), "reveal simulation")?;
    Ok(sender.kron(&recv).into_amplitudes())
}

/// Acceptance probability when the receiver checks `sender` (ordered
/// `(R_i, C_i)_i (x) W`) against fresh copies of `psi_tilde_bit`.
pub fn simulate_reveal(sender: &StateVector, work_dim: usize, bit: u8, inst: &CommitmentInstance) -> Result<f64> {
    let frame = RevealFrame::new(&inst.params, work_dim);
    let expected: usize = frame.dims[..=frame.work].iter().product();
    if sender.dim() != expected {
        return config(format!("sender state has dimension {}, expected {expected}", sender.dim()));
    }
    let mut v = joint_with_receiver(sender, inst, bit)?;
    frame.apply_verifier(&mut v);
    Ok(norm_sqr(&v))
}

/// Both reveal probabilities from one commit-phase state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BindingOutcome {
    pub p0: f64,
    pub p1: f64,
    /// `p0 + p1 - 1`.
    pub slack: f64,
}

pub fn binding_sum(strategy: &Strategy, params: &CommitmentParams, seed: u64) -> Result<BindingOutcome> {
    let inst = build_commit_states(params, seed)?;
    let (state, w) = strategy.commit_state(&inst)?;
    let p0 = simulate_reveal(&state, w, 0, &inst)?;
    let p1 = simulate_reveal(&state, w, 1, &inst)?;
    Ok(BindingOutcome { p0, p1, slack: p0 + p1 - 1.0 })
}

/// Per-copy extractor measurement on `C`.
#[derive(Debug, Clone)]
pub struct Extractor {
    pub pi_0: HermitianOp,
    pub pi_1: HermitianOp,
    pub pi_perp: HermitianOp,
    pub rank_rho_0: usize,
}

impl Extractor {
    fn op(&self, outcome: Outcome) -> &HermitianOp {
        match outcome {
            Outcome::Zero => &self.pi_0,
            Outcome::One => &self.pi_1,
            Outcome::Perp => &self.pi_perp,
        }
    }

    /// Defect of `Pi_0 + Pi_1 + Pi_perp = I` and pairwise orthogonality.
    pub fn completeness_defect(&self) -> f64 {
        let dim = self.pi_0.dim();
        let sum = self.pi_0.matrix() + self.pi_1.matrix() + self.pi_perp.matrix();
        let ops = [&self.pi_0, &self.pi_1, &self.pi_perp];
        let mut worst = crate::qmath::linalg::max_abs_diff(&sum, &CMatrix::identity(dim, dim));
        for i in 0..3 {
            worst = worst.max(ops[i].idempotence_defect());
            for j in i + 1..3 {
                let prod = ops[i].matrix() * ops[j].matrix();
                worst = worst.max(prod.iter().map(|z| z.norm()).fold(0.0, f64::max));
            }
        }
        worst
    }
}

/// Extracted bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    Zero,
    One,
    Perp,
}

impl Outcome {
    pub fn from_bit(bit: u8) -> Self {
        if bit == 0 {
            Outcome::Zero
        } else {
            Outcome::One
        }
    }
}

/// `Pi_0` = support projector of `rho_0`, `Pi_1` = its complement, `Pi_perp = 0`.
pub fn build_extractor(inst: &CommitmentInstance) -> Result<Extractor> {
    let (vals, vecs) = hermitian_eigen(inst.rho_0.matrix());
    let dim = inst.rho_0.dim();
    let mut pi0 = CMatrix::zeros(dim, dim);
    let mut rank = 0;
    for (k, &v) in vals.iter().enumerate() {
        if v > SUPPORT_TOL {
            let col = vecs.column(k);
            pi0 += col * col.adjoint();
            rank += 1;
        }
    }
    let pi1 = CMatrix::identity(dim, dim) - &pi0;
    Ok(Extractor {
        pi_0: HermitianOp::new(pi0)?,
        pi_1: HermitianOp::new(pi1)?,
        pi_perp: HermitianOp::new(CMatrix::zeros(dim, dim))?,
        rank_rho_0: rank,
    })
}

/// Majority rule over per-copy outcomes: a bit wins when it occurs in more
/// than two thirds of the copies.
pub fn aggregate(outcomes: &[Outcome]) -> Outcome {
    let n = outcomes.len();
    let zeros = outcomes.iter().filter(|&&o| o == Outcome::Zero).count();
    let ones = outcomes.iter().filter(|&&o| o == Outcome::One).count();
    if 3 * zeros > 2 * n {
        Outcome::Zero
    } else if 3 * ones > 2 * n {
        Outcome::One
    } else {
        Outcome::Perp
    }
}

fn outcome_strings(copies: usize) -> Vec<Vec<Outcome>> {
    let all = [Outcome::Zero, Outcome::One, Outcome::Perp];
    let mut out = vec![Vec::new()];
    for _ in 0..copies {
        out = out
            .into_iter()
            .flat_map(|p| {
                all.iter().map(move |&o| {
                    let mut q = p.clone();
                    q.push(o);
                    q
                })
            })
            .collect();
    }
    out
}

/// `Pi~_outcome v`: sum of per-copy products over strings with that majority.
fn apply_aggregate(
    v: &[num_complex::Complex64],
    ext: &Extractor,
    outcome: Outcome,
    dims: &[usize],
    c_pos: &[usize],
) -> Vec<num_complex::Complex64> {
    let mut acc = vec![ZERO; v.len()];
    for string in outcome_strings(c_pos.len()) {
        if aggregate(&string) != outcome {
            continue;
        }
        if string.iter().any(|&o| ext.op(o).matrix().iter().all(|z| *z == ZERO)) {
            continue;
        }
        let mut w = v.to_vec();
        for (&o, &p) in string.iter().zip(c_pos) {
            apply_local(&mut w, dims, &[p], ext.op(o).matrix());
        }
        for (a, b) in acc.iter_mut().zip(&w) {
            *a += b;
        }
    }
    acc
}

/// Outcome of the Real/Ideal comparison for one revealed bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealIdealReport {
    pub reveal_bit: u8,
    pub accept_real: f64,
    /// Probabilities of the extracted outcomes `0, 1, perp`.
    pub extractor_probs: [f64; 3],
    pub tau_b_distance: f64,
    pub tau_perp_distance: f64,
    pub fail_probability: f64,
    /// `||rho_real - rho_ideal||`, the sum of the three terms above.
    pub gap: f64,
    pub work_dim: usize,
}

/// Runs both experiments exactly on the purified joint state. In Ideal the
/// extractor's three-outcome measurement is applied (Lüders) before the
/// verifier's; an accepted reveal that disagrees with the extracted bit is
/// `fail`.
pub fn real_ideal_gap(strategy: &Strategy, reveal_bit: u8, params: &CommitmentParams, seed: u64) -> Result<RealIdealReport> {
    let inst = build_commit_states(params, seed)?;
    let (sender, w) = strategy.commit_state(&inst)?;
    let ext = build_extractor(&inst)?;
    let frame = RevealFrame::new(params, w);
    let (fine, c_pos) = frame.fine_dims(params);
    let work_fine = fine.len() - params.copies - 1;
    let v = joint_with_receiver(&sender, &inst, reveal_bit)?;

    let accepted = |x: &[num_complex::Complex64]| {
        let mut a = x.to_vec();
        frame.apply_verifier(&mut a);
        let r: Vec<_> = x.iter().zip(&a).map(|(p, q)| p - q).collect();
        (a, r)
    };
    let tau = |x: &[num_complex::Complex64]| partial_trace_vector(x, &fine, &[work_fine]);

    let (acc_real, rej_real) = accepted(&v);
    let tau_real_b = tau(&acc_real);
    let tau_real_perp = tau(&rej_real);

    let mut tau_ideal_b = CMatrix::zeros(w, w);
    let mut tau_ideal_perp = CMatrix::zeros(w, w);
    let mut fail = 0.0;
    let mut probs = [0.0; 3];
    let target = Outcome::from_bit(reveal_bit);
    for (slot, outcome) in [Outcome::Zero, Outcome::One, Outcome::Perp].into_iter().enumerate() {
        let branch = apply_aggregate(&v, &ext, outcome, &fine, &c_pos);
        probs[slot] = norm_sqr(&branch);
        if probs[slot] < 1e-300 {
            continue;
        }
        let (acc, rej) = accepted(&branch);
        tau_ideal_perp += tau(&rej);
        if outcome == target {
            tau_ideal_b += tau(&acc);
        } else {
            fail += norm_sqr(&acc);
        }
    }
    let herm = |m: CMatrix| (&m + m.adjoint()) * c(0.5, 0.0);
    let tau_b_distance = trace_norm_matrix(&herm(tau_real_b - tau_ideal_b))?;
    let tau_perp_distance = trace_norm_matrix(&herm(tau_real_perp - tau_ideal_perp))?;
    Ok(RealIdealReport {
        reveal_bit,
        accept_real: norm_sqr(&acc_real),
        extractor_probs: probs,
        tau_b_distance,
        tau_perp_distance,
        fail_probability: fail,
        gap: tau_b_distance + tau_perp_distance + fail,
        work_dim: w,
    })
}
