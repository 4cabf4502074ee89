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

use chrs_core::attack::{run_attack, AttackConfig};
use chrs_core::commitment::{
    binding_sum, hiding_gap, multi_swap_accept, real_ideal_gap, simulate_reveal, build_commit_states,
    swap_test_circuit, CommitmentParams, Strategy,
};
use chrs_core::moments::{harrow_gap, haar_moment, EnsembleSpec};
use chrs_core::prs::{pad_twirl_bruteforce, pad_twirl_channel, prs_gap, stretch_check, default_family};
use chrs_core::qmath::{haar_state, DensityMatrix, RegisterLayout};
use chrs_core::qmath::linalg::max_abs_diff;
use chrs_core::Mode;

#[test]
fn hiding_matches_prs_gap() {
    let hiding = hiding_gap(&CommitmentParams::new(4, 2, 1, 1).unwrap(), 1).unwrap();
    let prs = prs_gap(&EnsembleSpec::exact(4, 4, 2)).unwrap();
    assert!((hiding.per_copy - prs.lhs_distance).abs() < 1e-12);
    assert!((prs.lhs_distance - 15.0 / 68.0).abs() < 1e-12);
}

#[test]
fn harrow_and_prs_agree_on_full_pad() {
    // half pad on 4 qubits against a Haar unitary on the padded 2 qubits
    let h = harrow_gap(4, 2, Mode::Exact, 0, 0).unwrap();
    let p = prs_gap(&EnsembleSpec::exact(4, 4, 2)).unwrap();
    assert!((h.lhs_distance - 15.0 / 68.0).abs() < 1e-12);
    assert!((p.lhs_distance - 15.0 / 68.0).abs() < 1e-12);
}

#[test]
fn pad_twirl_of_haar_moment() {
    let rho = haar_moment(8, 1).unwrap();
    let a = pad_twirl_channel(&rho, 3, 2).unwrap();
    let b = pad_twirl_bruteforce(rho.matrix(), 3, 2).unwrap();
    assert!(max_abs_diff(a.matrix(), b.matrix()) < 1e-12);
}

#[test]
fn frozen_gap_values() {
    for (m, n, want) in [(2, 2, 0.3), (4, 2, 63.0 / 136.0), (3, 2, 5.0 / 12.0), (5, 4, 21.0 / 88.0)] {
        let g = prs_gap(&EnsembleSpec::exact(m, n, 2)).unwrap();
        assert!((g.lhs_distance - want).abs() < 1e-12, "m={m} n={n}: {}", g.lhs_distance);
    }
}

#[test]
fn mc_gap_tracks_exact() {
    let exact = prs_gap(&EnsembleSpec::exact(2, 2, 2)).unwrap();
    let mc = prs_gap(&EnsembleSpec::monte_carlo(2, 2, 2, 20_000, 7)).unwrap();
    let err = mc.mc_error.unwrap();
    assert!((mc.lhs_distance - exact.lhs_distance).abs() < 5.0 * err + 0.02);
}

#[test]
fn stretch_holds_on_small_case() {
    let r = stretch_check(3, 1, &default_family(3), Mode::Exact, 0, 0).unwrap();
    assert!(r.gap.pass);
    assert!(r.margin() >= 0.0);
}

#[test]
fn honest_reveal_and_swap_formula() {
    let p = CommitmentParams::new(2, 1, 2, 1).unwrap();
    let inst = build_commit_states(&p, 3).unwrap();
    for bit in [0u8, 1] {
        let (state, w) = Strategy::Honest { bit }.commit_state(&inst).unwrap();
        assert!((simulate_reveal(&state, w, bit, &inst).unwrap() - 1.0).abs() < 1e-9);
    }
    let layout = RegisterLayout::new(vec![("a", 2), ("b", 2)]).unwrap();
    let rho = haar_state(4, 1).density();
    let sigma = DensityMatrix::maximally_mixed(4);
    let a = multi_swap_accept(&rho, &sigma, &layout).unwrap();
    let b = swap_test_circuit(&rho, &sigma, &layout).unwrap();
    assert!((a - b).abs() < 1e-9);
}

#[test]
fn binding_and_extraction() {
    let slack: Vec<f64> = (1..=3)
        .map(|c| binding_sum(&Strategy::Honest { bit: 0 }, &CommitmentParams::new(2, 1, c, 1).unwrap(), 5).unwrap().slack)
        .collect();
    assert!(slack[0] > slack[1] && slack[1] > slack[2]);
    let r = real_ideal_gap(&Strategy::Honest { bit: 0 }, 0, &CommitmentParams::new(2, 1, 1, 1).unwrap(), 5).unwrap();
    assert!(r.gap.abs() < 1e-9);
}

#[test]
fn attack_separates_small_instance() {
    let r = run_attack(&AttackConfig { m: 2, n: 2, c: 2, ell: 4, order_seed: 2, trials: 50 }, 9).unwrap();
    assert!(r.advantage > 0.0);
    assert!(r.case2_vacuous);
    assert_eq!(r.effective_repetitions, 2);
}
