// Copyright 2026 The spinfriction Authors
// SPDX-License-Identifier: Apache-2.0

//! Internal friction in finite-time unitary driving of a spin-1/2.
//!
//! A spin in a static longitudinal field `b0` and a time-dependent
//! transverse field `B(t)` is prepared in a Gibbs state, driven from
//! `B1` to `B2` and back again in total time `tau`, and compared with its
//! initial state through the quantum relative entropy. In units where
//! `hbar = k_B = 1` the relative entropy equals `beta` times the excess
//! (friction) work left in the spin.
//!
//! Module map:
//!
//! * [`spin`]: 2x2 complex algebra, spin operators, Bloch vectors, spectral calculus.
//! * [`pulses`]: control-field laws `B(t)` for each protocol leg.
//! * [`dynamics`]: Liouville-von Neumann propagation with exact step exponentials.
//! * [`thermo`]: Gibbs states, entropies and the friction report.
//! * [`protocol`]: the forward-backward experiment, tau sweeps, frictionless search.
//! * [`cli`]: the `spinfriction` command-line front end.

pub mod cli;
pub mod dynamics;
mod error;
pub mod protocol;
pub mod pulses;
pub mod spin;
pub mod thermo;

pub use error::{Error, Result};
pub use protocol::{ProtocolConfig, ProtocolResult, SweepSeries};
pub use pulses::{PulseSchedule, PulseShape};
pub use spin::{BlochVector, ComplexMatrix2, DensityMatrix, HermitianOperator};
pub use thermo::{FrictionReport, GibbsState};
