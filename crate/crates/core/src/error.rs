// Copyright 2026 The spinfriction Authors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("operator is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("not a valid density matrix: {0}")]
    InvalidState(String),

    #[error("Bloch vector of length {0} lies outside the unit ball")]
    NonPhysicalBloch(f64),

    #[error("time {t} lies outside the schedule interval [0, {duration}]")]
    TimeOutOfRange { t: f64, duration: f64 },

    #[error("relative entropy diverges: state has weight {weight:e} outside the support of the reference")]
    Divergent { weight: f64 },

    #[error("numerical integrity failure: {0}")]
    Integrity(String),

    #[error("integrator error estimate {estimate:e} exceeds the limit {limit:e}")]
    Convergence { estimate: f64, limit: f64 },

    #[error("at tau = {tau}: {source}")]
    AtTau {
        tau: f64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// True for failures of the numerics themselves (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::Divergent { .. } | Error::Integrity(_) | Error::Convergence { .. } => true,
            Error::AtTau { source, .. } => source.is_numerical(),
            _ => false,
        }
    }

    pub(crate) fn at_tau(self, tau: f64) -> Self {
        Error::AtTau {
            tau,
            source: Box::new(self),
        }
    }
}
