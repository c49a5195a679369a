// Copyright 2026 The spinfriction Authors
// SPDX-License-Identifier: Apache-2.0

//! Control-field laws for one leg of the protocol.
//!
//! A leg of duration `d` moves the transverse field from `b_start` to
//! `b_end` as `b_start + (b_end - b_start) * f(t / d)`, with
//! `f(s) = sin(pi s / 2)` or `f(s) = s^n`. Each leg lasts `tau / 2`, so
//! `t / d = 2t / tau`.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::protocol::ProtocolConfig;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PulseShape {
    Sinusoidal,
    /// `s^n` with `n > 0`.
    PowerLaw(f64),
}

impl PulseShape {
    pub const SQRT: PulseShape = PulseShape::PowerLaw(0.5);
    pub const LINEAR: PulseShape = PulseShape::PowerLaw(1.0);
    pub const QUADRATIC: PulseShape = PulseShape::PowerLaw(2.0);

    /// The four pulses of the reference study, in CLI order.
    pub const PRESETS: [PulseShape; 4] = [
        PulseShape::Sinusoidal,
        PulseShape::SQRT,
        PulseShape::LINEAR,
        PulseShape::QUADRATIC,
    ];

    pub fn validate(&self) -> Result<()> {
        match *self {
            PulseShape::Sinusoidal => Ok(()),
            PulseShape::PowerLaw(n) if n.is_finite() && n > 0.0 => Ok(()),
            PulseShape::PowerLaw(n) => Err(Error::InvalidParameter(format!(
                "power-law exponent must be positive and finite, got {n}"
            ))),
        }
    }

    /// The normalized profile `f(s)` on `[0, 1]`, with `f(0) = 0`, `f(1) = 1`.
    #[inline]
    pub fn profile(&self, s: f64) -> f64 {
        match *self {
            PulseShape::Sinusoidal => (FRAC_PI_2 * s).sin(),
            PulseShape::PowerLaw(1.0) => s,
            PulseShape::PowerLaw(2.0) => s * s,
            PulseShape::PowerLaw(0.5) => s.sqrt(),
            PulseShape::PowerLaw(n) => s.powf(n),
        }
    }
}

impl fmt::Display for PulseShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PulseShape::Sinusoidal => f.write_str("sin"),
            PulseShape::PowerLaw(n) => write!(f, "pow:{n}"),
        }
    }
}

impl FromStr for PulseShape {
    type Err = Error;

    /// Accepts `sin` and `pow:<n>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let shape = if s.eq_ignore_ascii_case("sin") {
            PulseShape::Sinusoidal
        } else if let Some(n) = s.strip_prefix("pow:") {
            let n: f64 = n
                .trim()
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("bad power-law exponent in {s:?}")))?;
            PulseShape::PowerLaw(n)
        } else {
            return Err(Error::InvalidParameter(format!(
                "unknown pulse shape {s:?} (expected \"sin\" or \"pow:<n>\")"
            )));
        };
        shape.validate()?;
        Ok(shape)
    }
}

/// `B(t)` on one leg.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PulseSchedule {
    shape: PulseShape,
    b_start: f64,
    b_end: f64,
    duration: f64,
}

impl PulseSchedule {
    pub fn new(shape: PulseShape, b_start: f64, b_end: f64, duration: f64) -> Result<Self> {
        shape.validate()?;
        if !(b_start.is_finite() && b_end.is_finite()) {
            return Err(Error::InvalidParameter("field endpoints must be finite".into()));
        }
        if !(duration.is_finite() && duration > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "leg duration must be positive and finite, got {duration}"
            )));
        }
        Ok(Self {
            shape,
            b_start,
            b_end,
            duration,
        })
    }

    pub fn shape(&self) -> PulseShape {
        self.shape
    }

    pub fn b_start(&self) -> f64 {
        self.b_start
    }

    pub fn b_end(&self) -> f64 {
        self.b_end
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    /// Field at time `t` in `[0, duration]`.
    pub fn value(&self, t: f64) -> Result<f64> {
        if !(0.0..=self.duration).contains(&t) {
            return Err(Error::TimeOutOfRange {
                t,
                duration: self.duration,
            });
        }
        Ok(self.value_at_phase(t / self.duration))
    }

    /// Field at normalized phase `s = t / duration`; `s` is not range-checked.
    #[inline]
    pub fn value_at_phase(&self, s: f64) -> f64 {
        if s >= 1.0 {
            return self.b_end;
        }
        self.b_start + (self.b_end - self.b_start) * self.shape.profile(s)
    }
}

/// Free-function form of [`PulseSchedule::value`].
pub fn pulse_value(schedule: &PulseSchedule, t: f64) -> Result<f64> {
    schedule.value(t)
}

/// `B1 -> B2` over `tau / 2`.
pub fn forward_schedule(cfg: &ProtocolConfig) -> Result<PulseSchedule> {
    PulseSchedule::new(cfg.shape, cfg.b1, cfg.b2, 0.5 * cfg.tau)
}

/// `B2 -> B1` over `tau / 2`, same shape.
pub fn backward_schedule(cfg: &ProtocolConfig) -> Result<PulseSchedule> {
    PulseSchedule::new(cfg.shape, cfg.b2, cfg.b1, 0.5 * cfg.tau)
}
