// Copyright 2026 The spinfriction Authors
// SPDX-License-Identifier: Apache-2.0

//! Exit criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.
//!
//! Run with `cargo test -p spinfriction --test acceptance`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use proptest::prelude::Rng;
use proptest::test_runner::{RngAlgorithm, TestRng};

use spinfriction::dynamics::{evolve, evolve_sampled, propagate, Trajectory};
use spinfriction::protocol::{evaluate, gap_series, run_protocol, sweep_tau, tau_grid};
use spinfriction::pulses::{backward_schedule, forward_schedule};
use spinfriction::spin::{hamiltonian, state_from_bloch};
use spinfriction::thermo::{gibbs_state, relative_entropy, relative_entropy_forms};
use spinfriction::{
    BlochVector, ComplexMatrix2, DensityMatrix, ProtocolConfig, PulseSchedule, PulseShape, SweepSeries,
};

struct Uniform(TestRng);

impl Uniform {
    fn seeded(tag: u8) -> Self {
        let mut seed = [0x5a; 32];
        seed[0] = tag;
        Uniform(TestRng::from_seed(RngAlgorithm::ChaCha, &seed))
    }

    fn next(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next()
    }

    /// Uniform in the open Bloch ball of radius `max_radius`.
    fn bloch(&mut self, max_radius: f64) -> BlochVector {
        loop {
            let v = [0, 1, 2].map(|_| self.range(-1.0, 1.0));
            let n2: f64 = v.iter().map(|x| x * x).sum();
            if n2 < 1.0 {
                let [x, y, z] = v.map(|c| c * max_radius);
                return BlochVector::new(x, y, z);
            }
        }
    }
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn within(elapsed: Duration, budget_secs: u64) -> bool {
    elapsed <= Duration::from_secs(budget_secs)
}

fn random_suite(n: usize) -> Vec<ProtocolConfig> {
    let mut rng = Uniform::seeded(1);
    (0..n)
        .map(|i| ProtocolConfig {
            b0: rng.range(0.0, 1.0),
            b1: rng.range(0.0, 1.0),
            b2: rng.range(0.0, 1.0),
            beta: rng.range(0.0, 5.0),
            tau: rng.range(0.1, 100.0),
            shape: PulseShape::PRESETS[i % 4],
            ..ProtocolConfig::default()
        })
        .collect()
}

/// Klein nonnegativity and the friction identity over one random suite.
fn klein_and_identity() -> (Outcome, Outcome) {
    let suite = random_suite(1000);
    let start = Instant::now();
    let mut min_s = f64::INFINITY;
    let mut max_gap = 0.0f64;
    let mut errors = Vec::new();
    for cfg in &suite {
        match evaluate(cfg) {
            Ok(out) => {
                let s = match relative_entropy(&out.rho2, &out.rho0) {
                    Ok(s) => s,
                    Err(e) => {
                        errors.push(format!("tau={}: {e}", cfg.tau));
                        continue;
                    }
                };
                let h1 = hamiltonian(cfg.b0, cfg.b1);
                let work = h1.expectation(&out.rho2) - h1.expectation(&out.rho0);
                min_s = min_s.min(s);
                max_gap = max_gap.max((s - cfg.beta * work).abs());
            }
            Err(e) => errors.push(format!("{cfg:?}: {e}")),
        }
    }
    let elapsed = start.elapsed();
    let ok = errors.is_empty();
    let c1 = outcome(
        ok && min_s >= -1e-10 && within(elapsed, 60),
        format!(
            "{} runs, min S = {min_s:.3e}, {:.1} s, {} errors{}",
            suite.len(),
            elapsed.as_secs_f64(),
            errors.len(),
            errors.first().map(|e| format!(" (first: {e})")).unwrap_or_default()
        ),
    );
    let c2 = outcome(
        ok && max_gap < 1e-8,
        format!("max |S - beta*w| = {max_gap:.3e} over {} runs", suite.len()),
    );
    (c1, c2)
}

fn dual_forms() -> Outcome {
    let mut rng = Uniform::seeded(3);
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut failures = 0;
    for _ in 0..10_000 {
        // Radius below 1 keeps both states full rank.
        let rho = state_from_bloch(&rng.bloch(0.999)).unwrap();
        let sigma = state_from_bloch(&rng.bloch(0.999)).unwrap();
        match relative_entropy_forms(&rho, &sigma) {
            Ok(f) => worst = worst.max((f.trace_form - f.spectral_form).abs()),
            Err(_) => failures += 1,
        }
    }
    let elapsed = start.elapsed();
    outcome(
        failures == 0 && worst < 1e-10 && within(elapsed, 10),
        format!("10000 pairs, max gap {worst:.3e}, {failures} errors, {:.2} s", elapsed.as_secs_f64()),
    )
}

fn sudden_limit() -> Outcome {
    let mut worst = 0.0f64;
    let mut errors = 0;
    for shape in PulseShape::PRESETS {
        match evaluate(&ProtocolConfig::default().with_tau(1e-4).with_shape(shape)) {
            Ok(out) => worst = worst.max(out.report.relative_entropy),
            Err(_) => errors += 1,
        }
    }
    outcome(errors == 0 && worst < 1e-8, format!("max S at tau=1e-4 is {worst:.3e}"))
}

fn default_sweeps() -> Result<(Vec<SweepSeries>, Duration), String> {
    let grid = tau_grid(0.5, 100.0, 0.5).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let series = PulseShape::PRESETS
        .iter()
        .map(|&shape| sweep_tau(&ProtocolConfig::default().with_shape(shape), &grid))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    Ok((series, start.elapsed()))
}

fn peak_location(sweeps: &[SweepSeries], elapsed: Duration) -> Outcome {
    let mut pass = within(elapsed, 300);
    let mut parts = Vec::new();
    for s in sweeps {
        let peak = s.peak().unwrap();
        pass &= (5.0..=15.0).contains(&peak.tau);
        parts.push(format!("{} at {}", s.shape(), peak.tau));
    }
    outcome(pass, format!("argmax {}; sweep {:.1} s", parts.join(", "), elapsed.as_secs_f64()))
}

fn near_frictionless_dip(sweeps: &[SweepSeries]) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for s in sweeps {
        let peak = s.peak().unwrap().relative_entropy;
        let dip = s
            .local_minima()
            .into_iter()
            .map(|i| s.points[i])
            .filter(|p| (15.0..=25.0).contains(&p.tau) && p.relative_entropy < 0.1 * peak)
            .min_by(|a, b| a.relative_entropy.total_cmp(&b.relative_entropy));
        match dip {
            Some(p) => parts.push(format!("{} {:.1}% at {}", s.shape(), 100.0 * p.relative_entropy / peak, p.tau)),
            None => {
                pass = false;
                let nearest = s
                    .local_minima()
                    .into_iter()
                    .map(|i| s.points[i])
                    .find(|p| p.tau > s.peak().unwrap().tau);
                let hint = nearest
                    .map(|p| format!("first dip at {} ({:.1}%)", p.tau, 100.0 * p.relative_entropy / peak))
                    .unwrap_or_else(|| "no dip".into());
                parts.push(format!("{} none in [15, 25], {hint}", s.shape()));
            }
        }
    }
    outcome(pass, parts.join("; "))
}

fn tail_behavior(sweeps: &[SweepSeries]) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    let tail = |s: &SweepSeries| s.mean_over(60.0, 100.0).unwrap();
    let sqrt = sweeps.iter().find(|s| s.shape() == PulseShape::SQRT).unwrap();
    for s in sweeps {
        let ratio = tail(s) / s.peak().unwrap().relative_entropy;
        if s.shape() != PulseShape::SQRT {
            pass &= ratio < 0.05;
            pass &= tail(sqrt) > tail(s);
        }
        parts.push(format!("{} {:.2e} ({:.1}%)", s.shape(), tail(s), 100.0 * ratio));
    }
    outcome(pass, format!("tail means {}", parts.join(", ")))
}

fn conservation() -> Outcome {
    let mut suite = random_suite(60);
    suite.extend(PulseShape::PRESETS.map(|s| ProtocolConfig::default().with_shape(s)));
    let (mut trace, mut purity, mut length) = (0.0f64, 0.0f64, 0.0f64);
    let mut samples = 0usize;
    let mut errors = 0;
    let mut check = |rho0: &DensityMatrix, traj: &Trajectory| {
        for x in &traj.samples {
            trace = trace.max((x.state.trace() - 1.0).abs());
            purity = purity.max((x.state.purity() - rho0.purity()).abs());
            length = length.max((x.state.bloch().norm() - rho0.bloch().norm()).abs());
            samples += 1;
        }
    };
    for cfg in &suite {
        match run_protocol(cfg) {
            Ok(r) => {
                check(&r.rho0, &r.forward_trajectory);
                check(&r.rho0, &r.backward_trajectory);
            }
            Err(_) => errors += 1,
        }
    }
    outcome(
        errors == 0 && trace < 1e-12 && purity < 1e-10 && length < 1e-10,
        format!(
            "{} runs, {samples} samples: trace {trace:.1e}, purity {purity:.1e}, length {length:.1e}",
            suite.len()
        ),
    )
}

fn integrator_order() -> Outcome {
    let cfg = ProtocolConfig::default().with_tau(20.0);
    let rho0 = gibbs_state(&hamiltonian(cfg.b0, cfg.b1), cfg.beta).unwrap().state;
    let (fwd, bwd) = (forward_schedule(&cfg).unwrap(), backward_schedule(&cfg).unwrap());
    let round_trip = |steps| {
        let rho1 = propagate(&rho0, cfg.b0, &fwd, steps).unwrap();
        propagate(&rho1, cfg.b0, &bwd, steps).unwrap()
    };
    let reference = round_trip(1_000_000);
    let err = |steps| round_trip(steps).matrix().max_abs_diff(reference.matrix());
    let (coarse, fine) = (err(cfg.steps_per_leg), err(2 * cfg.steps_per_leg));
    let ratio = coarse / fine;
    outcome(
        (3.5..=4.5).contains(&ratio),
        format!("errors {coarse:.3e} / {fine:.3e}, ratio {ratio:.3}"),
    )
}

/// Scaling-and-squaring Taylor series for `exp(a)`.
fn expm(a: ComplexMatrix2) -> ComplexMatrix2 {
    let a = a.scale_real(1.0 / 1024.0);
    let (mut term, mut sum) = (ComplexMatrix2::IDENTITY, ComplexMatrix2::IDENTITY);
    for k in 1..30 {
        term = (term * a).scale_real(1.0 / k as f64);
        sum = sum + term;
    }
    for _ in 0..10 {
        sum = sum * sum;
    }
    sum
}

fn analytic_oracles() -> Outcome {
    let cfg = ProtocolConfig::default();

    // Larmor precession of spin-up about a constant transverse field.
    let field = cfg.b1;
    let up = DensityMatrix::new(ComplexMatrix2::from_real([[1.0, 0.0], [0.0, 0.0]])).unwrap();
    let schedule = PulseSchedule::new(PulseShape::Sinusoidal, field, field, cfg.tau / 2.0).unwrap();
    let traj = evolve_sampled(&up, 0.0, &schedule, cfg.steps_per_leg, 1).unwrap();
    let larmor = traj
        .samples
        .iter()
        .map(|x| (x.state.bloch().rz - (field * x.t).cos()).abs())
        .fold(0.0, f64::max);

    let h1 = hamiltonian(cfg.b0, cfg.b1);
    let gibbs = gibbs_state(&h1, cfg.beta).unwrap().state;
    let boltzmann = expm(h1.matrix().scale(Complex64::new(-cfg.beta, 0.0)));
    let brute = boltzmann.scale(boltzmann.trace().inv());
    let gibbs_gap = gibbs.matrix().max_abs_diff(&brute);

    let still = PulseSchedule::new(PulseShape::Sinusoidal, cfg.b1, cfg.b1, cfg.tau / 2.0).unwrap();
    let stationary = evolve(&gibbs, cfg.b0, &still, cfg.steps_per_leg)
        .unwrap()
        .samples
        .iter()
        .map(|x| x.state.matrix().max_abs_diff(gibbs.matrix()))
        .fold(0.0, f64::max);

    outcome(
        larmor < 1e-8 && gibbs_gap < 1e-12 && stationary < 1e-12,
        format!("larmor {larmor:.1e}, gibbs vs expm {gibbs_gap:.1e}, stationary {stationary:.1e}"),
    )
}

fn gap_endpoints() -> Outcome {
    let (start, end) = (0.5f64.sqrt(), (0.25f64 + 0.0025).sqrt());
    let mut worst = 0.0f64;
    for shape in PulseShape::PRESETS {
        let gaps = gap_series(&ProtocolConfig::default().with_shape(shape)).unwrap();
        worst = worst
            .max((gaps.first().unwrap().delta_e - start).abs())
            .max((gaps.last().unwrap().delta_e - end).abs());
    }
    outcome(worst < 1e-12, format!("max endpoint error {worst:.1e}"))
}

fn main() -> ExitCode {
    let mut results: Vec<(&str, Outcome)> = Vec::new();
    let mut report = |name, o: Outcome| {
        println!("{} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        results.push((name, o));
    };

    let (c1, c2) = klein_and_identity();
    report(" 1 klein nonnegativity", c1);
    report(" 2 friction identity", c2);
    report(" 3 dual relative-entropy forms", dual_forms());
    report(" 4 sudden limit", sudden_limit());
    match default_sweeps() {
        Ok((sweeps, elapsed)) => {
            report(" 5 peak location", peak_location(&sweeps, elapsed));
            report(" 6 near-frictionless dip", near_frictionless_dip(&sweeps));
            report(" 7 tail behavior", tail_behavior(&sweeps));
        }
        Err(e) => {
            for name in [" 5 peak location", " 6 near-frictionless dip", " 7 tail behavior"] {
                report(name, outcome(false, format!("sweep failed: {e}")));
            }
        }
    }
    report(" 8 conservation", conservation());
    report(" 9 integrator order", integrator_order());
    report("10 analytic oracles", analytic_oracles());
    report("11 gap endpoints", gap_endpoints());

    let failed: Vec<_> = results.iter().filter(|(_, o)| !o.pass).map(|(n, _)| n.trim()).collect();
    println!(
        "acceptance: {} passed, {} failed",
        results.len() - failed.len(),
        failed.len()
    );
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
