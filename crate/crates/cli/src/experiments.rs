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

//! Dispatch from a resolved [`Config`] to the core routines.

use std::time::Instant;

use chrs_core::attack::{haar_overlap_tail, levy_concentration_probe, run_attack, AttackConfig};
use chrs_core::commitment::{
    binding_sum, hiding_gap, purify, real_ideal_gap, CommitmentParams, Strategy,
};
use chrs_core::moments::{haar_moment, haar_moment_mc, harrow_gap, phi_u_moment, EnsembleSpec};
use chrs_core::prs::{
    block_norm_survey, default_family, half_split_moment, prs_ensemble_state, prs_gap, split_deviation,
    stretch_check,
};
use chrs_core::qmath::dump::{read_dump, write_dump};
use chrs_core::qmath::{CMatrix, DensityMatrix};
use chrs_core::Mode;

use crate::config::{Config, Experiment, StrategyName};
use crate::report::{BoundEntry, ExperimentReport};
use crate::CliError;

/// Resolves `cfg` and runs it. Every random draw derives from `cfg.seed`.
pub fn run_experiment(cfg: &Config) -> Result<ExperimentReport, CliError> {
    let cfg = cfg.resolve()?;
    let start = Instant::now();
    let mut rep = ExperimentReport::new(cfg.experiment.as_str());
    rep.config_echo = cfg.pairs().into_iter().map(|(k, v)| (k.to_string(), v)).collect();
    let seed = cfg.seed.unwrap_or(0);
    rep.seeds.push(seed);
    if let Some(o) = cfg.order_seed {
        rep.seeds.push(o);
    }
    let artifact = run_inner(&cfg, seed, &mut rep)?;
    if let Some(path) = &cfg.dump {
        let m = artifact.ok_or_else(|| {
            CliError::Config(format!("experiment `{}` has no matrix to dump", cfg.experiment))
        })?;
        write_dump(path, &m)?;
        rep.artifact_paths.push(path.clone());
    }
    rep.wall_time_ms = start.elapsed().as_millis() as u64;
    Ok(rep)
}

fn req<T: Copy>(v: Option<T>) -> T {
    v.expect("resolved config")
}

fn run_inner(cfg: &Config, seed: u64, rep: &mut ExperimentReport) -> Result<Option<CMatrix>, CliError> {
    let want_dump = cfg.dump.is_some();
    match cfg.experiment {
        Experiment::Moments => {
            let (d, r) = (req(cfg.d), req(cfg.r));
            let exact = haar_moment(d, r)?;
            match req(cfg.mode) {
                Mode::Exact => {
                    rep.metric("trace", exact.matrix().trace().re);
                    Ok(want_dump.then(|| exact.into_matrix()))
                }
                Mode::MonteCarlo => {
                    let avg = haar_moment_mc(d, r, req(cfg.samples), seed)?;
                    let (dist, err) = avg.distance_to(exact.matrix())?;
                    rep.metric_err("distance", dist, err);
                    rep.metric("entrywise_stderr", avg.entrywise_stderr);
                    rep.bound("mc_tolerance", BoundEntry::new("HaarMoment", dist, 0.05, true, dist <= 0.05));
                    Ok(want_dump.then(|| avg.mean.into_matrix()))
                }
            }
        }
        Experiment::Harrow => {
            let (d, r, mode) = (req(cfg.d), req(cfg.r), req(cfg.mode));
            let g = harrow_gap(d, r, mode, req(cfg.samples), seed)?;
            gap_metrics(rep, &g);
            rep.bound("harrow", BoundEntry::from_gap(&g));
            Ok(if want_dump { Some(phi_u_moment(d, r, mode, req(cfg.samples), seed)?.into_matrix()) } else { None })
        }
        Experiment::PrsGap => {
            let spec = EnsembleSpec {
                m: req(cfg.m),
                n: req(cfg.n),
                r: req(cfg.r),
                mode: req(cfg.mode),
                samples: req(cfg.samples),
                seed,
            };
            let g = prs_gap(&spec)?;
            gap_metrics(rep, &g);
            rep.bound("prs_gap", BoundEntry::from_gap(&g));
            Ok(if want_dump { Some(prs_ensemble_state(&spec)?.into_matrix()) } else { None })
        }
        Experiment::Stretch => {
            let m = req(cfg.m);
            let s = stretch_check(m, req(cfg.r), &default_family(m), req(cfg.mode), req(cfg.samples), seed)?;
            gap_metrics(rep, &s.gap);
            rep.metric("rhs_gap", s.rhs_gap);
            rep.metric("additive", s.additive);
            rep.metric("margin", s.margin());
            rep.bound("stretch", BoundEntry::from_gap(&s.gap));
            Ok(None)
        }
        Experiment::Split => {
            let (m, r, samples) = (req(cfg.m), req(cfg.r), req(cfg.samples));
            let (_, g) = half_split_moment(m, r, samples, seed)?;
            gap_metrics(rep, &g);
            rep.bound("half_split", BoundEntry::from_gap(&g));
            let dev = split_deviation(m, samples, seed)?;
            rep.metric_err("split_deviation", dev.mean, dev.stderr);
            rep.bound(
                "split_deviation",
                BoundEntry::new("Lem4.6", dev.mean, dev.bound, dev.bound <= 2.0, dev.pass),
            );
            Ok(None)
        }
        Experiment::Blocknorm => {
            let s = block_norm_survey(req(cfg.m), req(cfg.trials), cfg.eps, seed)?;
            rep.metric("hypothesis_hits", s.hypothesis_hits as f64);
            rep.metric("counterexamples", s.counterexamples as f64);
            rep.metric("max_ratio", s.max_ratio);
            let lhs = s.counterexamples as f64;
            rep.bound("block_norm", BoundEntry::new("Lem4.7", lhs, 0.0, true, s.counterexamples == 0));
            Ok(None)
        }
        Experiment::CommitHiding => {
            let p = CommitmentParams::new(req(cfg.lambda), req(cfg.s), 1, req(cfg.t))?;
            let h = hiding_gap(&p, req(cfg.c))?;
            rep.metric("per_copy", h.per_copy);
            gap_metrics(rep, &h.gap);
            rep.bound("hiding", BoundEntry::from_gap(&h.gap));
            Ok(None)
        }
        Experiment::CommitBinding => {
            let p = CommitmentParams::new(req(cfg.lambda), req(cfg.s), req(cfg.c), 1)?;
            let strategy = strategy_of(cfg)?;
            let b = binding_sum(&strategy, &p, seed)?;
            rep.metric("p0", b.p0);
            rep.metric("p1", b.p1);
            rep.metric("slack", b.slack);
            if let Strategy::Honest { bit } = strategy {
                let p = if bit == 0 { b.p0 } else { b.p1 };
                let defect = (1.0 - p).abs();
                rep.bound("completeness", BoundEntry::new("Fig3", defect, 1e-9, true, defect <= 1e-9));
            }
            Ok(None)
        }
        Experiment::CommitExtractor => {
            let p = CommitmentParams::new(req(cfg.lambda), req(cfg.s), req(cfg.c), 1)?;
            let strategy = strategy_of(cfg)?;
            let r = real_ideal_gap(&strategy, req(cfg.bit), &p, seed)?;
            rep.metric("accept_real", r.accept_real);
            rep.metric("extract_zero", r.extractor_probs[0]);
            rep.metric("extract_one", r.extractor_probs[1]);
            rep.metric("extract_perp", r.extractor_probs[2]);
            rep.metric("tau_b_distance", r.tau_b_distance);
            rep.metric("tau_perp_distance", r.tau_perp_distance);
            rep.metric("fail_probability", r.fail_probability);
            rep.metric("gap", r.gap);
            if matches!(strategy, Strategy::Honest { bit: 0 }) && req(cfg.bit) == 0 {
                rep.bound("honest_gap", BoundEntry::new("DefA.4", r.gap, 1e-9, true, r.gap <= 1e-9));
            }
            Ok(None)
        }
        Experiment::Attack => {
            let ac = AttackConfig {
                m: req(cfg.m),
                n: req(cfg.n),
                c: req(cfg.c),
                ell: req(cfg.ell),
                order_seed: req(cfg.order_seed),
                trials: req(cfg.trials),
            };
            let a = run_attack(&ac, seed)?;
            rep.metric_err("accept_pseudorandom", a.accept_rate_pseudorandom, a.stderr_pseudorandom);
            rep.metric_err("accept_haar", a.accept_rate_haar, a.stderr_haar);
            rep.metric("advantage", a.advantage);
            rep.metric("epsilon", a.epsilon);
            rep.metric("delta", a.delta);
            rep.metric("effective_repetitions", a.effective_repetitions as f64);
            let floor_lhs = a.per_trial_pseudorandom.iter().cloned().fold(f64::INFINITY, f64::min);
            // the floor is only claimed for eps = 0
            let floor_ok = a.epsilon < 1e-9;
            rep.bound(
                "case1_floor",
                BoundEntry::new("Lem5.1", floor_lhs, a.case1_floor, floor_ok, floor_lhs >= a.case1_floor - 1e-12),
            );
            rep.bound(
                "case2_ceiling",
                BoundEntry::new(
                    "Lem5.1",
                    a.accept_rate_haar,
                    a.case2_ceiling,
                    !a.case2_vacuous,
                    a.accept_rate_haar <= a.case2_ceiling + 3.0 * a.stderr_haar,
                ),
            );
            Ok(None)
        }
        Experiment::Concentration => {
            let t = haar_overlap_tail(req(cfg.d), req(cfg.samples), seed)?;
            rep.metric_err("overlap_tail", t.fraction, t.stderr);
            rep.metric("overlap_tail_analytic", t.analytic);
            let off = (t.fraction - t.analytic).abs();
            rep.bound("overlap_analytic", BoundEntry::new("Lem5.3", off, 3.0 * t.stderr, true, t.within_sigma(3.0)));
            rep.bound(
                "overlap_envelope",
                BoundEntry::new("Lem5.3", t.fraction, t.bound, !t.bound_vacuous, t.fraction <= t.bound),
            );
            let l = levy_concentration_probe(req(cfg.m), req(cfg.samples), seed)?;
            rep.metric_err("levy_mean", l.mean_f, l.stderr_f);
            rep.metric("levy_delta", l.delta);
            rep.metric("levy_tail", l.empirical_tail);
            rep.bound(
                "levy",
                BoundEntry::new("Lem3.1", l.empirical_tail, l.bound, !l.bound_vacuous, l.empirical_tail <= l.bound),
            );
            Ok(None)
        }
    }
}

fn gap_metrics(rep: &mut ExperimentReport, g: &chrs_core::GapReport) {
    match g.mc_error {
        Some(e) => rep.metric_err("lhs_distance", g.lhs_distance, e),
        None => rep.metric("lhs_distance", g.lhs_distance),
    }
    rep.metric("bound_value", g.bound_value);
}

fn strategy_of(cfg: &Config) -> Result<Strategy, CliError> {
    Ok(match req(cfg.strategy) {
        StrategyName::HonestFlip => Strategy::Honest { bit: 0 },
        StrategyName::HonestOne => Strategy::Honest { bit: 1 },
        StrategyName::Superposition => Strategy::Superposition,
        StrategyName::Custom => {
            let path = cfg.state.as_ref().expect("resolved config");
            let rho = DensityMatrix::new(read_dump(path)?)?;
            let (state, work_dim) = purify(&rho)?;
            Strategy::Custom { state, work_dim }
        }
    })
}
