// Copyright 2026 The spinfriction Authors
// SPDX-License-Identifier: Apache-2.0

//! The forward-backward experiment and the studies built on it.
//!
//! ```text
//!   rho0 = Gibbs(H1, beta)  --[B1 -> B2, tau/2]-->  rho1  --[B2 -> B1, tau/2]-->  rho2
//! ```
//!
//! Friction is measured by `S(rho2 || rho0)`. [`sweep_tau`] maps it over a
//! grid of total times and [`find_frictionless`] locates the dips where it
//! nearly vanishes.

use rayon::prelude::*;

use crate::dynamics::{evolve_sampled, propagate, Trajectory};
use crate::error::{Error, Result};
use crate::pulses::{backward_schedule, forward_schedule, PulseShape};
use crate::spin::{energy_gap, hamiltonian, DensityMatrix};
use crate::thermo::{friction_report, gibbs_state, FrictionReport, GibbsState};

pub const DEFAULT_STEPS_PER_LEG: usize = 20_000;
pub const DEFAULT_SAMPLE_STRIDE: usize = 10;
/// Largest accepted gap between the `steps` and `2 * steps` final states.
pub const CONVERGENCE_LIMIT: f64 = 1e-6;
/// Relative-entropy values at or below this count as no friction at all.
pub const ZERO_FRICTION: f64 = 1e-12;

/// One forward-backward experiment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProtocolConfig {
    /// Static longitudinal field.
    pub b0: f64,
    /// Transverse field at the start (and end) of the protocol.
    pub b1: f64,
    /// Transverse field at the turning point.
    pub b2: f64,
    pub beta: f64,
    /// Total protocol time; each leg lasts `tau / 2`.
    pub tau: f64,
    pub shape: PulseShape,
    pub steps_per_leg: usize,
    /// Keep every `sample_stride`-th step in stored trajectories.
    pub sample_stride: usize,
}

impl Default for ProtocolConfig {
    /// `B0 = B1 = 0.5`, `B2 = 0.05`, `beta = 1`, `tau = 20`, sinusoidal pulse.
    fn default() -> Self {
        Self {
            b0: 0.5,
            b1: 0.5,
            b2: 0.05,
            beta: 1.0,
            tau: 20.0,
            shape: PulseShape::Sinusoidal,
            steps_per_leg: DEFAULT_STEPS_PER_LEG,
            sample_stride: DEFAULT_SAMPLE_STRIDE,
        }
    }
}

impl ProtocolConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("b0", self.b0), ("b1", self.b1), ("b2", self.b2)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be finite, got {v}")));
            }
        }
        if !(self.beta.is_finite() && self.beta >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "beta must be finite and non-negative, got {}",
                self.beta
            )));
        }
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tau must be positive and finite, got {}",
                self.tau
            )));
        }
        if self.steps_per_leg == 0 {
            return Err(Error::InvalidParameter("steps per leg must be at least 1".into()));
        }
        if self.sample_stride == 0 {
            return Err(Error::InvalidParameter("sample stride must be at least 1".into()));
        }
        self.shape.validate()
    }

    pub fn with_tau(&self, tau: f64) -> Self {
        Self { tau, ..*self }
    }

    pub fn with_shape(&self, shape: PulseShape) -> Self {
        Self { shape, ..*self }
    }
}

/// `(2t / tau, Delta E)` on the forward leg.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GapSample {
    pub phase: f64,
    pub delta_e: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolResult {
    pub config: ProtocolConfig,
    pub gibbs: GibbsState,
    pub rho0: DensityMatrix,
    pub rho1: DensityMatrix,
    pub rho2: DensityMatrix,
    pub report: FrictionReport,
    pub forward_trajectory: Trajectory,
    pub backward_trajectory: Trajectory,
    pub gap_series: Vec<GapSample>,
    /// Largest entrywise gap between `rho2` and its value at twice the step count.
    pub integrator_error: f64,
}

/// Terminal states and report without stored trajectories.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProtocolOutcome {
    pub rho0: DensityMatrix,
    pub rho1: DensityMatrix,
    pub rho2: DensityMatrix,
    pub report: FrictionReport,
    pub integrator_error: f64,
}

/// Both legs at `steps` per leg, final state only.
fn round_trip(cfg: &ProtocolConfig, rho0: &DensityMatrix, steps: usize) -> Result<(DensityMatrix, DensityMatrix)> {
    let rho1 = propagate(rho0, cfg.b0, &forward_schedule(cfg)?, steps)?;
    let rho2 = propagate(&rho1, cfg.b0, &backward_schedule(cfg)?, steps)?;
    Ok((rho1, rho2))
}

fn convergence_gate(cfg: &ProtocolConfig, rho0: &DensityMatrix, rho2: &DensityMatrix) -> Result<f64> {
    let (_, fine) = round_trip(cfg, rho0, 2 * cfg.steps_per_leg)?;
    let estimate = rho2.matrix().max_abs_diff(fine.matrix());
    if estimate.is_nan() || estimate > CONVERGENCE_LIMIT {
        return Err(Error::Convergence {
            estimate,
            limit: CONVERGENCE_LIMIT,
        });
    }
    Ok(estimate)
}

/// Runs the protocol without keeping trajectories.
pub fn evaluate(cfg: &ProtocolConfig) -> Result<ProtocolOutcome> {
    cfg.validate()?;
    let h1 = hamiltonian(cfg.b0, cfg.b1);
    let gibbs = gibbs_state(&h1, cfg.beta)?;
    let rho0 = gibbs.state;
    let (rho1, rho2) = round_trip(cfg, &rho0, cfg.steps_per_leg)?;
    let integrator_error = convergence_gate(cfg, &rho0, &rho2)?;
    let report = friction_report(&rho2, &gibbs, &h1)?;
    Ok(ProtocolOutcome {
        rho0,
        rho1,
        rho2,
        report,
        integrator_error,
    })
}

/// Runs the full forward-backward protocol, keeping sampled trajectories.
pub fn run_protocol(cfg: &ProtocolConfig) -> Result<ProtocolResult> {
    cfg.validate()?;
    let h1 = hamiltonian(cfg.b0, cfg.b1);
    let gibbs = gibbs_state(&h1, cfg.beta)?;
    let rho0 = gibbs.state;
    let forward = forward_schedule(cfg)?;
    let backward = backward_schedule(cfg)?;

    let forward_trajectory = evolve_sampled(&rho0, cfg.b0, &forward, cfg.steps_per_leg, cfg.sample_stride)?;
    let rho1 = forward_trajectory.final_state();
    let backward_trajectory = evolve_sampled(&rho1, cfg.b0, &backward, cfg.steps_per_leg, cfg.sample_stride)?;
    let rho2 = backward_trajectory.final_state();

    let integrator_error = convergence_gate(cfg, &rho0, &rho2)?;
    let report = friction_report(&rho2, &gibbs, &h1)?;
    let gap_series = gap_series(cfg)?;

    Ok(ProtocolResult {
        config: *cfg,
        gibbs,
        rho0,
        rho1,
        rho2,
        report,
        forward_trajectory,
        backward_trajectory,
        gap_series,
        integrator_error,
    })
}

/// `Delta E` along the forward leg on the trajectory sampling grid, without
/// running the dynamics.
pub fn gap_series(cfg: &ProtocolConfig) -> Result<Vec<GapSample>> {
    cfg.validate()?;
    let schedule = forward_schedule(cfg)?;
    let steps = cfg.steps_per_leg;
    let mut phases: Vec<usize> = (0..=steps).step_by(cfg.sample_stride).collect();
    if phases.last() != Some(&steps) {
        phases.push(steps);
    }
    Ok(phases
        .into_iter()
        .map(|k| {
            let phase = k as f64 / steps as f64;
            GapSample {
                phase,
                delta_e: energy_gap(cfg.b0, schedule.value_at_phase(phase)),
            }
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepPoint {
    pub tau: f64,
    pub relative_entropy: f64,
    pub friction_work: f64,
}

/// `S(tau)` for one pulse shape.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepSeries {
    pub template: ProtocolConfig,
    pub points: Vec<SweepPoint>,
}

impl SweepSeries {
    pub fn shape(&self) -> PulseShape {
        self.template.shape
    }

    pub fn taus(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.tau)
    }

    /// Largest relative entropy; the first one on ties.
    pub fn peak(&self) -> Option<SweepPoint> {
        self.points
            .iter()
            .copied()
            .reduce(|best, p| if p.relative_entropy > best.relative_entropy { p } else { best })
    }

    /// Interior grid points strictly below their left neighbour and not above their right.
    pub fn local_minima(&self) -> Vec<usize> {
        self.points
            .windows(3)
            .enumerate()
            .filter(|(_, w)| {
                w[1].relative_entropy < w[0].relative_entropy
                    && w[1].relative_entropy <= w[2].relative_entropy
            })
            .map(|(i, _)| i + 1)
            .collect()
    }

    /// Mean relative entropy over points with `lo <= tau <= hi`.
    pub fn mean_over(&self, lo: f64, hi: f64) -> Option<f64> {
        let (sum, n) = self
            .points
            .iter()
            .filter(|p| (lo..=hi).contains(&p.tau))
            .fold((0.0, 0usize), |(s, n), p| (s + p.relative_entropy, n + 1));
        (n > 0).then(|| sum / n as f64)
    }
}

/// `tau_min, tau_min + step, ...` up to `tau_max` inclusive (with a small
/// allowance for round-off in the division).
pub fn tau_grid(tau_min: f64, tau_max: f64, step: f64) -> Result<Vec<f64>> {
    if !(tau_min.is_finite() && tau_min > 0.0) {
        return Err(Error::InvalidParameter(format!("tau-min must be positive, got {tau_min}")));
    }
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::InvalidParameter(format!("tau-step must be positive, got {step}")));
    }
    if !(tau_max.is_finite() && tau_max >= tau_min) {
        return Err(Error::InvalidParameter(format!(
            "tau-max ({tau_max}) must be finite and not below tau-min ({tau_min})"
        )));
    }
    let n = ((tau_max - tau_min) / step + 1e-9).floor() as usize + 1;
    Ok((0..n).map(|k| tau_min + k as f64 * step).collect())
}

/// One protocol run per grid point, in parallel, assembled in grid order.
pub fn sweep_tau(template: &ProtocolConfig, tau_grid: &[f64]) -> Result<SweepSeries> {
    if tau_grid.is_empty() {
        return Err(Error::InvalidParameter("tau grid is empty".into()));
    }
    if tau_grid.windows(2).any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less)) {
        return Err(Error::InvalidParameter("tau grid must be strictly ascending".into()));
    }
    template.with_tau(tau_grid[0]).validate()?;

    let results: Vec<Result<SweepPoint>> = tau_grid
        .par_iter()
        .map(|&tau| {
            let outcome = evaluate(&template.with_tau(tau)).map_err(|e| e.at_tau(tau))?;
            Ok(SweepPoint {
                tau,
                relative_entropy: outcome.report.relative_entropy,
                friction_work: outcome.report.friction_work,
            })
        })
        .collect();
    let points = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(SweepSeries {
        template: *template,
        points,
    })
}

/// Friction level under which a dip counts as frictionless.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Threshold {
    Absolute(f64),
    /// Fraction of the largest relative entropy on the coarse scan.
    FractionOfPeak(f64),
}

impl Default for Threshold {
    fn default() -> Self {
        Threshold::FractionOfPeak(0.05)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchOptions {
    /// Coarse grid spacing in tau.
    pub spacing: f64,
    /// Golden-section bracket width at which refinement stops.
    pub tolerance: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            spacing: 0.25,
            tolerance: 1e-3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrictionlessPoint {
    pub tau: f64,
    pub relative_entropy: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FrictionlessSearch {
    /// Refined minima below the threshold, ascending in tau.
    pub minima: Vec<FrictionlessPoint>,
    pub threshold: f64,
    /// Every coarse point is already below the threshold (or friction is
    /// identically zero); no individual minima are reported.
    pub uniformly_below: bool,
    pub coarse: SweepSeries,
}

/// Coarse scan of `[lo, hi]` followed by golden-section refinement of each
/// interior local minimum that falls below the threshold.
pub fn find_frictionless(
    template: &ProtocolConfig,
    tau_range: (f64, f64),
    threshold: Threshold,
    options: SearchOptions,
) -> Result<FrictionlessSearch> {
    let (lo, hi) = tau_range;
    if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && hi > lo) {
        return Err(Error::InvalidParameter(format!("bad tau range [{lo}, {hi}]")));
    }
    if !(options.spacing > 0.0 && options.tolerance > 0.0) {
        return Err(Error::InvalidParameter("search spacing and tolerance must be positive".into()));
    }
    let mut grid = tau_grid(lo, hi, options.spacing)?;
    if grid.last().is_some_and(|&t| t < hi) {
        grid.push(hi);
    }
    let coarse = sweep_tau(template, &grid)?;
    let peak = coarse.peak().map_or(0.0, |p| p.relative_entropy);
    let level = match threshold {
        Threshold::Absolute(x) if x.is_finite() && x >= 0.0 => x,
        Threshold::FractionOfPeak(f) if f.is_finite() && f >= 0.0 => f * peak,
        _ => return Err(Error::InvalidParameter(format!("bad threshold {threshold:?}"))),
    };

    let uniformly_below = peak <= ZERO_FRICTION
        || coarse.points.iter().all(|p| p.relative_entropy < level);
    if uniformly_below {
        return Ok(FrictionlessSearch {
            minima: Vec::new(),
            threshold: level,
            uniformly_below,
            coarse,
        });
    }

    let objective = |tau: f64| -> Result<f64> {
        evaluate(&template.with_tau(tau))
            .map(|o| o.report.relative_entropy)
            .map_err(|e| e.at_tau(tau))
    };
    let mut minima = Vec::new();
    for i in coarse.local_minima() {
        let (left, mid, right) = (coarse.points[i - 1], coarse.points[i], coarse.points[i + 1]);
        let (tau, value) = golden_section_minimize(objective, left.tau, right.tau, options.tolerance)?;
        let best = if value <= mid.relative_entropy {
            FrictionlessPoint { tau, relative_entropy: value }
        } else {
            FrictionlessPoint { tau: mid.tau, relative_entropy: mid.relative_entropy }
        };
        if best.relative_entropy < level {
            minima.push(best);
        }
    }
    Ok(FrictionlessSearch {
        minima,
        threshold: level,
        uniformly_below,
        coarse,
    })
}

/// Golden-section search for a minimum of a unimodal function on `[a, b]`;
/// stops when the bracket is narrower than `tol`. Returns `(x, f(x))`.
pub fn golden_section_minimize(
    f: impl Fn(f64) -> Result<f64>,
    mut a: f64,
    mut b: f64,
    tol: f64,
) -> Result<(f64, f64)> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc < fd { (c, fc) } else { (d, fd) })
}
