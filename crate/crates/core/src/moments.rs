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

//! Exact and Monte Carlo ensemble averages over Haar states and unitaries.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{config, Error, Result};
use crate::gap::{GapReport, Mode};
use crate::qmath::cap::{check_operator_dim, checked_pow};
use crate::qmath::layout::permute_matrix;
use crate::qmath::linalg::{kron, trace_distance, trace_norm_matrix, CMatrix, CVector};
use crate::qmath::symmetric::binomial;
use crate::qmath::{antisym_projector_pair, haar_state_with, haar_unitary_with, seed, sym_projector};
use crate::qmath::{DensityMatrix, StateVector};

/// Resamples drawn when bootstrapping the error of a Monte Carlo distance.
pub const BOOTSTRAP_RESAMPLES: usize = 200;

/// Hermiticity tolerance accepted on Monte Carlo means.
pub const MC_TOL: f64 = 1e-6;

const MAX_BATCHES: usize = 100;
const BATCH_ENTRY_BUDGET: usize = 1 << 22;

/// Parameters of a pseudorandom-state ensemble experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnsembleSpec {
    /// Qubits of the common Haar state.
    pub m: usize,
    /// Key length in bits; the pad covers `n / 2` qubits.
    pub n: usize,
    /// Copies handed to the distinguisher.
    pub r: usize,
    pub mode: Mode,
    pub samples: usize,
    pub seed: u64,
}

impl EnsembleSpec {
    pub fn exact(m: usize, n: usize, r: usize) -> Self {
        Self { m, n, r, mode: Mode::Exact, samples: 0, seed: 0 }
    }

    pub fn monte_carlo(m: usize, n: usize, r: usize, samples: usize, seed: u64) -> Self {
        Self { m, n, r, mode: Mode::MonteCarlo, samples, seed }
    }

    /// Pad width in qubits. An odd key length loses its last bit.
    pub fn pad_qubits(&self) -> usize {
        self.n / 2
    }

    /// Dimension of the `r`-copy register.
    pub fn joint_dim(&self) -> usize {
        1usize << (self.m * self.r)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.r == 0 {
            return config("ensemble needs m >= 1 and r >= 1");
        }
        if self.pad_qubits() > self.m {
            return config(format!("pad of {} qubits exceeds m = {}", self.pad_qubits(), self.m));
        }
        check_operator_dim(checked_pow(2, self.m * self.r), "r-copy ensemble operator")?;
        if self.mode == Mode::MonteCarlo && self.samples < 2 {
            return config("Monte Carlo mode needs at least 2 samples");
        }
        Ok(())
    }
}

/// One draw of a sampler.
#[derive(Debug, Clone)]
pub enum Sample {
    Pure(StateVector),
    Mixed(CMatrix),
}

/// Seeded Monte Carlo mean of density matrices.
///
/// Samples are grouped into a fixed number of batches (a function of the
/// sample count and dimension only) so the reduction order, and therefore
/// every bit of the result, is independent of the worker count.
#[derive(Debug, Clone)]
pub struct MCAverage {
    pub mean: DensityMatrix,
    pub samples: usize,
    /// Largest entrywise standard error of `mean`.
    pub entrywise_stderr: f64,
    /// Entrywise standard error (modulus) of `mean`.
    pub stderr: DMatrix<f64>,
    pub seed: u64,
    batch_sums: Vec<CMatrix>,
    batch_counts: Vec<usize>,
}

fn batch_count(samples: usize, dim: usize) -> usize {
    let by_memory = (BATCH_ENTRY_BUDGET / (dim * dim).max(1)).max(2);
    samples.min(MAX_BATCHES).min(by_memory).max(1)
}

/// Averages `samples` draws of `sampler`, sample `i` using the generator
/// seeded by `derive(seed, i)`.
pub fn mc_average<F>(dim: usize, samples: usize, seed: u64, sampler: F) -> Result<MCAverage>
where
    F: Fn(&mut ChaCha8Rng) -> Sample + Sync,
{
    if samples < 2 {
        return config("Monte Carlo average needs at least 2 samples");
    }
    check_operator_dim(dim as u128, "Monte Carlo mean")?;
    let batches = batch_count(samples, dim);
    let ranges: Vec<(usize, usize)> = (0..batches)
        .map(|b| (b * samples / batches, (b + 1) * samples / batches))
        .collect();
    let sums: Vec<Result<CMatrix>> = ranges
        .par_iter()
        .map(|&(lo, hi)| {
            let mut acc = CMatrix::zeros(dim, dim);
            for i in lo..hi {
                let mut rng = seed::rng_for(seed, i as u64);
                match sampler(&mut rng) {
                    Sample::Pure(s) => {
                        if s.dim() != dim {
                            return Err(Error::Numeric(format!(
                                "sampler produced dimension {} instead of {dim}",
                                s.dim()
                            )));
                        }
                        let v = s.to_vector();
                        acc.gerc(Complex64::new(1.0, 0.0), &v, &v, Complex64::new(1.0, 0.0));
                    }
                    Sample::Mixed(m) => {
                        if m.nrows() != dim || m.ncols() != dim {
                            return Err(Error::Numeric("sampler produced a mismatched matrix".into()));
                        }
                        acc += m;
                    }
                }
            }
            Ok(acc)
        })
        .collect();
    let batch_sums = sums.into_iter().collect::<Result<Vec<_>>>()?;
    let batch_counts: Vec<usize> = ranges.iter().map(|&(lo, hi)| hi - lo).collect();

    let mut total = CMatrix::zeros(dim, dim);
    for s in &batch_sums {
        total += s;
    }
    let n = samples as f64;
    let mean = total / Complex64::new(n, 0.0);

    let b = batch_sums.len();
    let mut stderr = DMatrix::<f64>::zeros(dim, dim);
    if b > 1 {
        for (s, &cnt) in batch_sums.iter().zip(&batch_counts) {
            let w = cnt as f64;
            for j in 0..dim {
                for i in 0..dim {
                    let dev = s[(i, j)] / w - mean[(i, j)];
                    stderr[(i, j)] += w * w * dev.norm_sqr();
                }
            }
        }
        let scale = b as f64 / ((b - 1) as f64 * n * n);
        stderr.apply(|v| *v = (*v * scale).sqrt());
    }
    let entrywise_stderr = stderr.iter().copied().fold(0.0, f64::max);
    Ok(MCAverage {
        mean: DensityMatrix::with_tolerance(mean, MC_TOL)?,
        samples,
        entrywise_stderr,
        stderr,
        seed,
        batch_sums,
        batch_counts,
    })
}

impl MCAverage {
    pub fn dim(&self) -> usize {
        self.mean.dim()
    }

    /// Bootstrap estimate of the trace-norm fluctuation of the mean: the RMS
    /// of `||M* - M||` over `resamples` batch-level resamples `M*`.
    pub fn bootstrap_trace_error(&self, resamples: usize) -> Result<f64> {
        let b = self.batch_sums.len();
        if b < 2 || resamples == 0 {
            return Ok(0.0);
        }
        let boot_seed = seed::derive_tagged(self.seed, "bootstrap", 0);
        let devs: Vec<Result<f64>> = (0..resamples)
            .into_par_iter()
            .map(|k| {
                let mut rng = seed::rng_for(boot_seed, k as u64);
                let mut acc = CMatrix::zeros(self.dim(), self.dim());
                let mut count = 0usize;
                for _ in 0..b {
                    let j = rng.random_range(0..b);
                    acc += &self.batch_sums[j];
                    count += self.batch_counts[j];
                }
                let resampled = acc / Complex64::new(count as f64, 0.0);
                let diff = resampled - self.mean.matrix();
                let herm = (&diff + diff.adjoint()) * Complex64::new(0.5, 0.0);
                trace_norm_matrix(&herm)
            })
            .collect();
        let mut sq = 0.0;
        for d in devs {
            let d = d?;
            sq += d * d;
        }
        Ok((sq / resamples as f64).sqrt())
    }

    /// Trace distance of the mean to `target` together with its bootstrap
    /// error.
    pub fn distance_to(&self, target: &CMatrix) -> Result<(f64, f64)> {
        let d = trace_distance(self.mean.matrix(), target)?;
        Ok((d, self.bootstrap_trace_error(BOOTSTRAP_RESAMPLES)?))
    }
}

/// `E_psi psi^{(x) r}` for Haar `psi` in dimension `d`, i.e. the normalized
/// symmetric projector. `r = 0` gives the scalar 1.
pub fn haar_moment(d: usize, r: usize) -> Result<DensityMatrix> {
    if r == 0 {
        return DensityMatrix::new(CMatrix::identity(1, 1));
    }
    let p = sym_projector(d, r)?;
    let rank = binomial(d + r - 1, r);
    DensityMatrix::new(p.into_matrix() / Complex64::new(rank, 0.0))
}

/// Monte Carlo estimate of [`haar_moment`].
pub fn haar_moment_mc(d: usize, r: usize, samples: usize, seed: u64) -> Result<MCAverage> {
    check_operator_dim(checked_pow(d, r), "Haar moment")?;
    mc_average(d.pow(r as u32), samples, seed, |rng| {
        Sample::Pure(haar_state_with(d, rng).tensor_power(r))
    })
}

/// `(U (x) I)|Phi_d>` as a state on `d * d`.
pub fn phi_u(u: &CMatrix) -> StateVector {
    let d = u.nrows();
    let norm = 1.0 / (d as f64).sqrt();
    let amps = (0..d * d).map(|idx| u[(idx / d, idx % d)] * norm).collect();
    StateVector::from_normalized(amps).expect("unitary maps Phi_d to a unit vector")
}

/// Exact `E_U phi_U^{(x) r}` for `r <= 2`, copies ordered `(A1 B1)(A2 B2)`.
pub fn phi_u_exact(d: usize, r: usize) -> Result<DensityMatrix> {
    check_operator_dim(checked_pow(d, 2 * r), "phi_U moment")?;
    match r {
        1 => Ok(DensityMatrix::maximally_mixed(d * d)),
        2 => {
            // Twirling the A side of Phi (x) Phi leaves sum_l P_l (x) P_l / (d_l d^2)
            // on (A1 A2)(B1 B2).
            let dd = (d * d) as f64;
            let sym = sym_projector(d, 2)?.into_matrix();
            let dsym = (d * (d + 1) / 2) as f64;
            let mut out = kron(&sym, &sym) / Complex64::new(dsym * dd, 0.0);
            if d > 1 {
                let anti = antisym_projector_pair(d);
                let danti = (d * (d - 1) / 2) as f64;
                out += kron(&anti, &anti) / Complex64::new(danti * dd, 0.0);
            }
            DensityMatrix::new(permute_matrix(&out, &[d; 4], &[0, 2, 1, 3]))
        }
        _ => Err(Error::Unsupported(format!(
            "exact phi_U moment only for r <= 2 (got r = {r}); use Monte Carlo mode"
        ))),
    }
}

/// Monte Carlo estimate of `E_U phi_U^{(x) r}`.
pub fn phi_u_mc(d: usize, r: usize, samples: usize, seed: u64) -> Result<MCAverage> {
    check_operator_dim(checked_pow(d, 2 * r), "phi_U moment")?;
    mc_average(d.pow(2 * r as u32), samples, seed, |rng| {
        Sample::Pure(phi_u(&haar_unitary_with(d, rng)).tensor_power(r))
    })
}

pub fn phi_u_moment(d: usize, r: usize, mode: Mode, samples: usize, seed: u64) -> Result<DensityMatrix> {
    match mode {
        Mode::Exact => phi_u_exact(d, r),
        Mode::MonteCarlo => Ok(phi_u_mc(d, r, samples, seed)?.mean),
    }
}

/// Distance between the `r`-th Haar moment on `d^2` and the `phi_U` moment,
/// against the bound `r^2 / d` (which requires `r^2 <= d`).
pub fn harrow_gap(d: usize, r: usize, mode: Mode, samples: usize, seed: u64) -> Result<GapReport> {
    if d == 0 || r == 0 {
        return config("harrow gap needs d >= 1 and r >= 1");
    }
    let haar = haar_moment(d * d, r)?;
    let (lhs, err) = match mode {
        Mode::Exact => (trace_distance(haar.matrix(), phi_u_exact(d, r)?.matrix())?, None),
        Mode::MonteCarlo => {
            let avg = phi_u_mc(d, r, samples, seed)?;
            let (lhs, err) = avg.distance_to(haar.matrix())?;
            (lhs, Some(err))
        }
    };
    let bound = (r * r) as f64 / d as f64;
    Ok(GapReport::new(lhs, bound, "Lem4.2", r * r <= d, mode, err))
}

/// Outer product helper for callers holding raw vectors.
pub fn projector_of(v: &CVector) -> CMatrix {
    v * v.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::linalg::{hermitian_eigenvalues, max_abs_diff};
    use crate::qmath::symmetric::{permutation_operator, permutations};

    #[test]
    fn first_moment_is_maximally_mixed() {
        let m = haar_moment(5, 1).unwrap();
        assert!(max_abs_diff(m.matrix(), DensityMatrix::maximally_mixed(5).matrix()) < 1e-15);
    }

    #[test]
    fn qubit_second_moment_spectrum() {
        let ev = hermitian_eigenvalues(haar_moment(2, 2).unwrap().matrix());
        let expected = [0.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0];
        for (a, b) in ev.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn moment_is_exchange_symmetric_and_supported_on_sym() {
        let m = haar_moment(2, 3).unwrap();
        for p in permutations(3) {
            let v = permutation_operator(2, &p);
            let conj = &v * m.matrix() * v.adjoint();
            assert!(max_abs_diff(&conj, m.matrix()) < 1e-12);
        }
        let p = sym_projector(2, 3).unwrap();
        let sandwiched = p.matrix() * m.matrix() * p.matrix();
        assert!(max_abs_diff(&sandwiched, m.matrix()) < 1e-12);
    }

    #[test]
    fn constant_sampler_has_zero_error() {
        let rho = crate::qmath::haar_state(3, 9).density().into_matrix();
        let avg = mc_average(3, 37, 1, |_| Sample::Mixed(rho.clone())).unwrap();
        assert!(max_abs_diff(avg.mean.matrix(), &rho) < 1e-15);
        assert!(avg.entrywise_stderr < 1e-15);
    }

    #[test]
    fn qubit_first_moment_within_three_stderr() {
        let avg = haar_moment_mc(2, 1, 10_000, 11).unwrap();
        let exact = DensityMatrix::maximally_mixed(2);
        for i in 0..2 {
            for j in 0..2 {
                let dev = (avg.mean.matrix()[(i, j)] - exact.matrix()[(i, j)]).norm();
                assert!(dev <= 3.0 * avg.stderr[(i, j)] + 1e-15, "entry ({i},{j})");
            }
        }
    }

    #[test]
    fn worker_count_does_not_change_bits() {
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| haar_moment_mc(4, 2, 3_000, 5).unwrap())
        };
        let a = run(1);
        let b = run(4);
        assert_eq!(a.mean, b.mean);
        assert_eq!(a.entrywise_stderr.to_bits(), b.entrywise_stderr.to_bits());
        let ea = a.bootstrap_trace_error(50).unwrap();
        let eb = b.bootstrap_trace_error(50).unwrap();
        assert_eq!(ea.to_bits(), eb.to_bits());
    }

    #[test]
    fn doubling_ladder_converges() {
        let exact = haar_moment(2, 2).unwrap();
        let mut prev: Option<(f64, f64)> = None;
        for samples in [500, 1000, 2000, 4000] {
            let avg = haar_moment_mc(2, 2, samples, 21).unwrap();
            let (d, err) = avg.distance_to(exact.matrix()).unwrap();
            if let Some((pd, perr)) = prev {
                assert!(d <= pd + 2.0 * perr.max(err), "{samples}: {d} vs {pd}");
            }
            prev = Some((d, err));
        }
    }

    #[test]
    fn phi_u_first_moment_matches_haar() {
        let a = phi_u_exact(3, 1).unwrap();
        let b = haar_moment(9, 1).unwrap();
        assert!(max_abs_diff(a.matrix(), b.matrix()) < 1e-15);
    }

    #[test]
    fn phi_u_second_moment_copy_swap_symmetric() {
        let m = phi_u_exact(3, 2).unwrap();
        let swapped = permute_matrix(m.matrix(), &[9, 9], &[1, 0]);
        assert!(max_abs_diff(&swapped, m.matrix()) < 1e-9);
        assert!((crate::qmath::linalg::trace(m.matrix()).re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn phi_u_exact_matches_monte_carlo() {
        let exact = phi_u_exact(2, 2).unwrap();
        let mc = phi_u_mc(2, 2, 20_000, 3).unwrap();
        assert!(trace_distance(exact.matrix(), mc.mean.matrix()).unwrap() < 0.05);
    }

    #[test]
    fn phi_u_exact_rejects_third_moment() {
        assert!(matches!(phi_u_exact(2, 3), Err(Error::Unsupported(_))));
    }

    #[test]
    fn harrow_examples() {
        let r = harrow_gap(2, 1, Mode::Exact, 0, 0).unwrap();
        assert!(r.lhs_distance < 1e-9 && r.verified());
        assert_eq!(r.bound_value, 0.5);
        let r = harrow_gap(2, 2, Mode::Exact, 0, 0).unwrap();
        assert!(!r.applicable);
        // exact value 3/10 from the closed-form spectrum
        assert!((r.lhs_distance - 0.3).abs() < 1e-12);
        let r = harrow_gap(4, 2, Mode::Exact, 0, 0).unwrap();
        assert!(r.verified());
        assert!((r.lhs_distance - 15.0 / 68.0).abs() < 1e-12);
    }

    #[test]
    fn spec_validation() {
        assert!(EnsembleSpec::exact(4, 4, 2).validate().is_ok());
        assert!(EnsembleSpec::exact(7, 4, 2).validate().is_err());
        assert!(EnsembleSpec::monte_carlo(2, 2, 1, 1, 0).validate().is_err());
        assert!(EnsembleSpec::exact(2, 6, 1).validate().is_err());
        assert_eq!(EnsembleSpec::exact(4, 3, 1).pad_qubits(), 1);
    }
}
