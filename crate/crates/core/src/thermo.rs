// Copyright 2026 The spinfriction Authors
// SPDX-License-Identifier: Apache-2.0

//! Gibbs states, entropies and the friction-work bookkeeping.
//!
//! All entropies are in nats. For a state `rho2` that is unitarily
//! connected to the Gibbs state `rho0 = exp(-beta H1)/Z`,
//!
//! ```text
//! S(rho2 || rho0) = beta * (tr[H1 rho2] - tr[H1 rho0]) = beta * w_fric
//! ```
//!
//! and [`friction_report`] checks that identity on every call.

use log::warn;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spin::{eigendecompose, overlap_sq, DensityMatrix, HermitianOperator};

/// Eigenvalues at or below this are treated as zero in the reference state.
pub const SUPPORT_FLOOR: f64 = 1e-12;
/// Below this smallest reference eigenvalue the logarithm is ill-conditioned.
pub const NEAR_SINGULAR: f64 = 1e-9;
/// Allowed gap between the trace-form and double-sum relative entropies.
pub const DUAL_FORM_TOL: f64 = 1e-10;
/// Allowed gap in `S = beta * w_fric`.
pub const FRICTION_IDENTITY_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GibbsState {
    pub state: DensityMatrix,
    pub beta: f64,
    /// `tr exp(-beta H)`.
    pub partition_function: f64,
}

impl GibbsState {
    pub fn temperature(&self) -> f64 {
        self.beta.recip()
    }
}

/// `exp(-beta h) / Z`, built in the eigenbasis of `h`.
pub fn gibbs_state(h: &HermitianOperator, beta: f64) -> Result<GibbsState> {
    if !beta.is_finite() || beta < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "inverse temperature must be finite and non-negative, got {beta}"
        )));
    }
    if beta == 0.0 {
        return Ok(GibbsState {
            state: DensityMatrix::maximally_mixed(),
            beta,
            partition_function: 2.0,
        });
    }
    let eig = eigendecompose(h);
    let [e0, e1] = eig.eigenvalues;
    // Weights relative to the ground level so large beta*E cannot overflow.
    let excited = (-beta * (e1 - e0)).exp();
    let shifted_z = 1.0 + excited;
    let populations = [1.0 / shifted_z, excited / shifted_z];
    let [p0, p1] = eig.projectors();
    let rho = p0.scale_real(populations[0]) + p1.scale_real(populations[1]);
    Ok(GibbsState {
        state: DensityMatrix::from_matrix_unchecked(rho.hermitian_part()),
        beta,
        partition_function: (-beta * e0).exp() * shifted_z,
    })
}

fn xlogx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// `-tr(rho ln rho)`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    let s: f64 = -rho.eigenvalues().iter().map(|&p| xlogx(p.max(0.0))).sum::<f64>();
    s.max(0.0)
}

/// Both evaluations of `S(rho || sigma)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RelativeEntropyForms {
    /// `tr[rho ln rho - rho ln sigma]` with matrix functions from spectral calculus.
    pub trace_form: f64,
    /// `sum_i p_i ln p_i - sum_ij p_i ln q_j |<psi_i|phi_j>|^2`.
    pub spectral_form: f64,
}

/// Evaluates both forms without comparing them.
pub fn relative_entropy_forms(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<RelativeEntropyForms> {
    let rho_eig = eigendecompose(&rho.as_operator());
    let sigma_eig = eigendecompose(&sigma.as_operator());
    let q = sigma_eig.eigenvalues;

    // Weight of rho on sigma's (numerical) kernel.
    let kernel_weight: f64 = sigma_eig
        .diagonal_of(rho.matrix())
        .iter()
        .zip(q)
        .filter(|(_, qj)| *qj <= SUPPORT_FLOOR)
        .map(|(w, _)| w.max(0.0))
        .sum();
    if kernel_weight > SUPPORT_FLOOR {
        return Err(Error::Divergent {
            weight: kernel_weight,
        });
    }
    if q[0] < NEAR_SINGULAR {
        warn!(
            "reference state is near-singular (smallest eigenvalue {:e}); relative entropy may lose precision",
            q[0]
        );
    }
    // ln on the support, 0 on the kernel.
    let log_q = q.map(|qj| if qj > SUPPORT_FLOOR { qj.ln() } else { 0.0 });

    let p = rho_eig.eigenvalues.map(|x| x.max(0.0));
    let rho_log_rho = {
        let [a, b] = rho_eig.projectors();
        a.scale_real(xlogx(p[0])) + b.scale_real(xlogx(p[1]))
    };
    let log_sigma = {
        let [a, b] = sigma_eig.projectors();
        a.scale_real(log_q[0]) + b.scale_real(log_q[1])
    };
    let trace_form = (rho_log_rho - *rho.matrix() * log_sigma).trace().re;

    let mut spectral_form = xlogx(p[0]) + xlogx(p[1]);
    for (pi, psi) in p.iter().zip(&rho_eig.eigenvectors) {
        for (lq, phi) in log_q.iter().zip(&sigma_eig.eigenvectors) {
            spectral_form -= pi * lq * overlap_sq(psi, phi);
        }
    }

    Ok(RelativeEntropyForms {
        trace_form,
        spectral_form,
    })
}

/// `S(rho || sigma)` in nats, cross-checked between the trace and double-sum forms.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    let forms = relative_entropy_forms(rho, sigma)?;
    let gap = (forms.trace_form - forms.spectral_form).abs();
    if gap.is_nan() || gap >= DUAL_FORM_TOL {
        return Err(Error::Integrity(format!(
            "relative entropy forms disagree: trace {} vs spectral {} (gap {gap:e})",
            forms.trace_form, forms.spectral_form
        )));
    }
    Ok(forms.trace_form)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FrictionReport {
    /// `S(rho2 || rho0)` in nats.
    pub relative_entropy: f64,
    /// `tr[H1 rho2] - tr[H1 rho0]`.
    pub friction_work: f64,
    /// Heat the bath would supply to re-thermalize: `-friction_work`.
    pub heat_to_bath: f64,
    /// `tr[H1 rho0]`.
    pub energy_initial: f64,
    /// `tr[H1 rho2]`.
    pub energy_final: f64,
}

/// Builds the report and verifies `S = beta * w_fric` to [`FRICTION_IDENTITY_TOL`].
pub fn friction_report(
    rho2: &DensityMatrix,
    gibbs0: &GibbsState,
    h1: &HermitianOperator,
) -> Result<FrictionReport> {
    let relative_entropy = relative_entropy(rho2, &gibbs0.state)?;
    let energy_initial = h1.expectation(&gibbs0.state);
    let energy_final = h1.expectation(rho2);
    let friction_work = energy_final - energy_initial;
    let gap = (relative_entropy - gibbs0.beta * friction_work).abs();
    if gap.is_nan() || gap >= FRICTION_IDENTITY_TOL {
        return Err(Error::Integrity(format!(
            "S = {relative_entropy:e} but beta * w_fric = {:e}; final state is not unitarily connected to the Gibbs state",
            gibbs0.beta * friction_work
        )));
    }
    if relative_entropy < -DUAL_FORM_TOL {
        return Err(Error::Integrity(format!(
            "negative relative entropy {relative_entropy:e}"
        )));
    }
    Ok(FrictionReport {
        relative_entropy,
        friction_work,
        heat_to_bath: -friction_work,
        energy_initial,
        energy_final,
    })
}
