// Copyright 2026 The spinfriction Authors
// SPDX-License-Identifier: Apache-2.0

//! Unitary propagation of `d rho / dt = -i [H(t), rho]`.
//!
//! Each step of length `dt` freezes the Hamiltonian at the midpoint field
//! `B(t_k + dt/2)` and applies its exact exponential. The scheme is unitary
//! at every step and globally second order in `dt`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pulses::PulseSchedule;
use crate::spin::{ComplexMatrix2, DensityMatrix, HermitianOperator};

/// `exp(-i (c I + b.sigma/2) dt)` in closed form.
#[inline]
fn precession(c: f64, b: [f64; 3], dt: f64) -> ComplexMatrix2 {
    let r = b[0].hypot(b[1]).hypot(b[2]);
    let phase = Complex64::from_polar(1.0, -c * dt);
    if r == 0.0 {
        return ComplexMatrix2::IDENTITY.scale(phase);
    }
    let (sin, cos) = (0.5 * r * dt).sin_cos();
    let k = sin / r;
    let [nx, ny, nz] = b.map(|x| x * k);
    let u = ComplexMatrix2::new(
        Complex64::new(cos, -nz),
        Complex64::new(-ny, -nx),
        Complex64::new(ny, -nx),
        Complex64::new(cos, nz),
    );
    if c == 0.0 {
        u
    } else {
        u.scale(phase)
    }
}

/// The one-step propagator `exp(-i h dt)`.
pub fn step_propagator(h: &HermitianOperator, dt: f64) -> ComplexMatrix2 {
    let (c, b) = h.components();
    precession(c, b, dt)
}

/// One stored point of a [`Trajectory`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrajectorySample {
    /// Time since the start of the leg.
    pub t: f64,
    pub state: DensityMatrix,
    /// Transverse field `B(t)` at this grid point.
    pub field: f64,
}

/// States on a uniform grid, thinned by `stride`. The first sample is the
/// initial state and the last is always the state at `t = duration`.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
    pub steps: usize,
    pub stride: usize,
    pub dt: f64,
}

impl Trajectory {
    pub fn first(&self) -> &TrajectorySample {
        &self.samples[0]
    }

    pub fn last(&self) -> &TrajectorySample {
        self.samples.last().expect("trajectory always holds the initial sample")
    }

    pub fn final_state(&self) -> DensityMatrix {
        self.last().state
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

fn check_steps(steps: usize) -> Result<()> {
    if steps == 0 {
        return Err(Error::InvalidParameter("step count must be at least 1".into()));
    }
    Ok(())
}

/// Steps `rho` through the schedule, calling `visit(k, rho_k)` after every step `k = 1..=steps`.
fn march(
    rho_init: &DensityMatrix,
    b0: f64,
    schedule: &PulseSchedule,
    steps: usize,
    mut visit: impl FnMut(usize, &DensityMatrix),
) -> DensityMatrix {
    let dt = schedule.duration() / steps as f64;
    let inv = 1.0 / steps as f64;
    let mut rho = *rho_init;
    for k in 0..steps {
        let field = schedule.value_at_phase((k as f64 + 0.5) * inv);
        let u = precession(0.0, [field, 0.0, b0], dt);
        rho = rho.conjugate_by(&u);
        visit(k + 1, &rho);
    }
    rho
}

/// Final state only.
pub fn propagate(
    rho_init: &DensityMatrix,
    b0: f64,
    schedule: &PulseSchedule,
    steps: usize,
) -> Result<DensityMatrix> {
    check_steps(steps)?;
    Ok(march(rho_init, b0, schedule, steps, |_, _| {}))
}

/// Full trajectory, every step stored.
pub fn evolve(
    rho_init: &DensityMatrix,
    b0: f64,
    schedule: &PulseSchedule,
    steps: usize,
) -> Result<Trajectory> {
    evolve_sampled(rho_init, b0, schedule, steps, 1)
}

/// Trajectory keeping every `stride`-th step plus the endpoint.
pub fn evolve_sampled(
    rho_init: &DensityMatrix,
    b0: f64,
    schedule: &PulseSchedule,
    steps: usize,
    stride: usize,
) -> Result<Trajectory> {
    check_steps(steps)?;
    if stride == 0 {
        return Err(Error::InvalidParameter("sample stride must be at least 1".into()));
    }
    let dt = schedule.duration() / steps as f64;
    let mut samples = Vec::with_capacity(steps / stride + 2);
    samples.push(TrajectorySample {
        t: 0.0,
        state: *rho_init,
        field: schedule.b_start(),
    });
    march(rho_init, b0, schedule, steps, |k, rho| {
        if k % stride == 0 || k == steps {
            let (t, field) = if k == steps {
                (schedule.duration(), schedule.b_end())
            } else {
                let s = k as f64 / steps as f64;
                (k as f64 * dt, schedule.value_at_phase(s))
            };
            samples.push(TrajectorySample {
                t,
                state: *rho,
                field,
            });
        }
    });
    Ok(Trajectory {
        samples,
        steps,
        stride,
        dt,
    })
}

/// Final states at `steps` and `2 * steps` and their largest entrywise gap.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvergenceEstimate {
    pub coarse: DensityMatrix,
    pub fine: DensityMatrix,
    pub error: f64,
}

pub fn convergence_check(
    rho_init: &DensityMatrix,
    b0: f64,
    schedule: &PulseSchedule,
    steps: usize,
) -> Result<ConvergenceEstimate> {
    let coarse = propagate(rho_init, b0, schedule, steps)?;
    let fine = propagate(rho_init, b0, schedule, 2 * steps)?;
    Ok(ConvergenceEstimate {
        coarse,
        fine,
        error: coarse.matrix().max_abs_diff(fine.matrix()),
    })
}
