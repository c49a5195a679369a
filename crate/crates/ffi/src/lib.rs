// Copyright 2026 The spinfriction Authors
// SPDX-License-Identifier: Apache-2.0

//! C ABI over the `spinfriction` library.
//!
//! Every entry point returns an [`SfStatus`]. On failure a description is
//! available from [`sf_last_error_message`] on the calling thread. Protocol
//! results are opaque handles owned by the caller and released with
//! [`sf_result_free`].
//!
//! Density matrices cross the boundary as 8 doubles in row-major order,
//! each entry stored as `(re, im)`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use spinfriction::dynamics::Trajectory;
use spinfriction::protocol::{evaluate, run_protocol};
use spinfriction::thermo::relative_entropy;
use spinfriction::{ComplexMatrix2, DensityMatrix, Error, FrictionReport, ProtocolConfig, ProtocolResult, PulseShape};

pub const SF_PULSE_SINUSOIDAL: u32 = 0;
pub const SF_PULSE_POWER_LAW: u32 = 1;

pub const SF_LEG_FORWARD: u32 = 0;
pub const SF_LEG_BACKWARD: u32 = 1;

pub const SF_STATE_INITIAL: u32 = 0;
pub const SF_STATE_MIDWAY: u32 = 1;
pub const SF_STATE_FINAL: u32 = 2;

/// Number of doubles in a flattened 2x2 complex matrix.
pub const SF_MATRIX_LEN: usize = 8;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SfStatus {
    Ok = 0,
    InvalidArgument = 1,
    NullPointer = 2,
    Divergent = 3,
    Integrity = 4,
    Convergence = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

impl From<&Error> for SfStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Divergent { .. } => SfStatus::Divergent,
            Error::Integrity(_) => SfStatus::Integrity,
            Error::Convergence { .. } => SfStatus::Convergence,
            Error::AtTau { source, .. } => SfStatus::from(source.as_ref()),
            _ => SfStatus::InvalidArgument,
        }
    }
}

/// Protocol parameters. `pulse_exponent` is read only for
/// `SF_PULSE_POWER_LAW`.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SfConfig {
    pub b0: f64,
    pub b1: f64,
    pub b2: f64,
    pub beta: f64,
    pub tau: f64,
    pub pulse_kind: u32,
    pub pulse_exponent: f64,
    pub steps_per_leg: usize,
    pub sample_stride: usize,
}

impl From<&ProtocolConfig> for SfConfig {
    fn from(c: &ProtocolConfig) -> Self {
        let (pulse_kind, pulse_exponent) = match c.shape {
            PulseShape::Sinusoidal => (SF_PULSE_SINUSOIDAL, 0.0),
            PulseShape::PowerLaw(n) => (SF_PULSE_POWER_LAW, n),
        };
        SfConfig {
            b0: c.b0,
            b1: c.b1,
            b2: c.b2,
            beta: c.beta,
            tau: c.tau,
            pulse_kind,
            pulse_exponent,
            steps_per_leg: c.steps_per_leg,
            sample_stride: c.sample_stride,
        }
    }
}

impl TryFrom<&SfConfig> for ProtocolConfig {
    type Error = Error;

    fn try_from(c: &SfConfig) -> Result<Self, Error> {
        let shape = match c.pulse_kind {
            SF_PULSE_SINUSOIDAL => PulseShape::Sinusoidal,
            SF_PULSE_POWER_LAW => PulseShape::PowerLaw(c.pulse_exponent),
            other => return Err(Error::InvalidParameter(format!("unknown pulse kind {other}"))),
        };
        let cfg = ProtocolConfig {
            b0: c.b0,
            b1: c.b1,
            b2: c.b2,
            beta: c.beta,
            tau: c.tau,
            shape,
            steps_per_leg: c.steps_per_leg,
            sample_stride: c.sample_stride,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SfReport {
    pub relative_entropy: f64,
    pub friction_work: f64,
    pub heat_to_bath: f64,
    pub energy_initial: f64,
    pub energy_final: f64,
    pub integrator_error: f64,
}

impl SfReport {
    fn new(r: &FrictionReport, integrator_error: f64) -> Self {
        SfReport {
            relative_entropy: r.relative_entropy,
            friction_work: r.friction_work,
            heat_to_bath: r.heat_to_bath,
            energy_initial: r.energy_initial,
            energy_final: r.energy_final,
            integrator_error,
        }
    }
}

/// One stored trajectory point as a Bloch vector.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SfBlochSample {
    pub t: f64,
    pub rx: f64,
    pub ry: f64,
    pub rz: f64,
    pub field: f64,
}

/// Opaque handle to a completed protocol run.
pub struct SfProtocolResult {
    inner: ProtocolResult,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_last_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn fail(status: SfStatus, message: impl Into<String>) -> SfStatus {
    set_last_error(message.into());
    status
}

fn fail_with(e: &Error) -> SfStatus {
    fail(SfStatus::from(e), e.to_string())
}

/// Runs `body` with the thread's error slot cleared, converting panics.
fn guard(body: impl FnOnce() -> SfStatus) -> SfStatus {
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            fail(SfStatus::Panic, format!("panic: {msg}"))
        }
    }
}

macro_rules! non_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            return fail(SfStatus::NullPointer, concat!("`", stringify!($p), "` is null"));
        })+
    };
}

unsafe fn read_matrix(p: *const f64) -> ComplexMatrix2 {
    let v = std::slice::from_raw_parts(p, SF_MATRIX_LEN);
    let c = |k: usize| Complex64::new(v[2 * k], v[2 * k + 1]);
    ComplexMatrix2::new(c(0), c(1), c(2), c(3))
}

unsafe fn write_matrix(m: &ComplexMatrix2, out: *mut f64) {
    let out = std::slice::from_raw_parts_mut(out, SF_MATRIX_LEN);
    for (k, z) in m.entries().enumerate() {
        out[2 * k] = z.re;
        out[2 * k + 1] = z.im;
    }
}

/// Message for the last failed call on this thread, or NULL after a
/// successful one. The pointer stays valid until the next `sf_*` call on
/// the same thread.
#[no_mangle]
pub extern "C" fn sf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `out` must be valid for writes of one `SfConfig`.
#[no_mangle]
pub unsafe extern "C" fn sf_config_default(out: *mut SfConfig) -> SfStatus {
    guard(|| {
        non_null!(out);
        out.write(SfConfig::from(&ProtocolConfig::default()));
        SfStatus::Ok
    })
}

/// Runs the forward-backward protocol and stores a new handle in `*out`.
/// `*out` is set to NULL on failure.
///
/// # Safety
/// `config` must point to a valid `SfConfig` and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sf_run_protocol(config: *const SfConfig, out: *mut *mut SfProtocolResult) -> SfStatus {
    guard(|| {
        non_null!(config, out);
        out.write(ptr::null_mut());
        let result = ProtocolConfig::try_from(&*config).and_then(|cfg| run_protocol(&cfg));
        match result {
            Ok(inner) => {
                out.write(Box::into_raw(Box::new(SfProtocolResult { inner })));
                SfStatus::Ok
            }
            Err(e) => fail_with(&e),
        }
    })
}

/// Releases a handle from [`sf_run_protocol`]. NULL is ignored.
///
/// # Safety
/// `result` must be NULL or a live handle that is not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sf_result_free(result: *mut SfProtocolResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// # Safety
/// `result` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sf_result_report(result: *const SfProtocolResult, out: *mut SfReport) -> SfStatus {
    guard(|| {
        non_null!(result, out);
        let r = &(*result).inner;
        out.write(SfReport::new(&r.report, r.integrator_error));
        SfStatus::Ok
    })
}

/// Copies one of the three protocol states (`SF_STATE_*`) into
/// `out[0..SF_MATRIX_LEN]`.
///
/// # Safety
/// `result` must be a live handle and `out` valid for `SF_MATRIX_LEN` writes.
#[no_mangle]
pub unsafe extern "C" fn sf_result_state(result: *const SfProtocolResult, which: u32, out: *mut f64) -> SfStatus {
    guard(|| {
        non_null!(result, out);
        let r = &(*result).inner;
        let state = match which {
            SF_STATE_INITIAL => r.rho0,
            SF_STATE_MIDWAY => r.rho1,
            SF_STATE_FINAL => r.rho2,
            other => return fail(SfStatus::InvalidArgument, format!("unknown state index {other}")),
        };
        write_matrix(state.matrix(), out);
        SfStatus::Ok
    })
}

fn leg(r: &ProtocolResult, leg: u32) -> Option<&Trajectory> {
    match leg {
        SF_LEG_FORWARD => Some(&r.forward_trajectory),
        SF_LEG_BACKWARD => Some(&r.backward_trajectory),
        _ => None,
    }
}

/// Number of stored samples on a leg (`SF_LEG_*`).
///
/// # Safety
/// `result` must be a live handle and `out_len` writable.
#[no_mangle]
pub unsafe extern "C" fn sf_result_trajectory_len(
    result: *const SfProtocolResult,
    which_leg: u32,
    out_len: *mut usize,
) -> SfStatus {
    guard(|| {
        non_null!(result, out_len);
        match leg(&(*result).inner, which_leg) {
            Some(traj) => {
                out_len.write(traj.len());
                SfStatus::Ok
            }
            None => fail(SfStatus::InvalidArgument, format!("unknown leg {which_leg}")),
        }
    })
}

/// Copies a leg's samples into `buf`. Times are measured from the start of
/// the leg. Fails with `BufferTooSmall` (writing nothing) when `capacity` is
/// below the trajectory length.
///
/// # Safety
/// `result` must be a live handle, `buf` valid for `capacity` writes.
#[no_mangle]
pub unsafe extern "C" fn sf_result_trajectory(
    result: *const SfProtocolResult,
    which_leg: u32,
    buf: *mut SfBlochSample,
    capacity: usize,
) -> SfStatus {
    guard(|| {
        non_null!(result, buf);
        let Some(traj) = leg(&(*result).inner, which_leg) else {
            return fail(SfStatus::InvalidArgument, format!("unknown leg {which_leg}"));
        };
        if capacity < traj.len() {
            return fail(
                SfStatus::BufferTooSmall,
                format!("trajectory has {} samples, buffer holds {capacity}", traj.len()),
            );
        }
        let out = std::slice::from_raw_parts_mut(buf, traj.len());
        for (slot, s) in out.iter_mut().zip(&traj.samples) {
            let r = s.state.bloch();
            *slot = SfBlochSample {
                t: s.t,
                rx: r.rx,
                ry: r.ry,
                rz: r.rz,
                field: s.field,
            };
        }
        SfStatus::Ok
    })
}

/// Relative entropy and friction work for each `taus[i]`, with every other
/// parameter taken from `config`. Either output may be NULL.
///
/// # Safety
/// `taus` must be valid for `len` reads; non-null outputs for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn sf_sweep_tau(
    config: *const SfConfig,
    taus: *const f64,
    len: usize,
    out_relative_entropy: *mut f64,
    out_friction_work: *mut f64,
) -> SfStatus {
    guard(|| {
        non_null!(config);
        if len == 0 {
            return SfStatus::Ok;
        }
        non_null!(taus);
        let template = match ProtocolConfig::try_from(&*config) {
            Ok(c) => c,
            Err(e) => return fail_with(&e),
        };
        let grid = std::slice::from_raw_parts(taus, len);
        let series = match spinfriction::protocol::sweep_tau(&template, grid) {
            Ok(s) => s,
            Err(e) => return fail_with(&e),
        };
        for (i, p) in series.points.iter().enumerate() {
            if !out_relative_entropy.is_null() {
                out_relative_entropy.add(i).write(p.relative_entropy);
            }
            if !out_friction_work.is_null() {
                out_friction_work.add(i).write(p.friction_work);
            }
        }
        SfStatus::Ok
    })
}

/// Report for a single protocol run without keeping trajectories.
///
/// # Safety
/// `config` must point to a valid `SfConfig` and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn sf_evaluate(config: *const SfConfig, out: *mut SfReport) -> SfStatus {
    guard(|| {
        non_null!(config, out);
        match ProtocolConfig::try_from(&*config).and_then(|cfg| evaluate(&cfg)) {
            Ok(o) => {
                out.write(SfReport::new(&o.report, o.integrator_error));
                SfStatus::Ok
            }
            Err(e) => fail_with(&e),
        }
    })
}

/// `S(rho || sigma)` in nats for two flattened density matrices.
///
/// # Safety
/// `rho` and `sigma` must be valid for `SF_MATRIX_LEN` reads, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sf_relative_entropy(rho: *const f64, sigma: *const f64, out: *mut f64) -> SfStatus {
    guard(|| {
        non_null!(rho, sigma, out);
        let value = DensityMatrix::new(read_matrix(rho))
            .and_then(|r| DensityMatrix::new(read_matrix(sigma)).map(|s| (r, s)))
            .and_then(|(r, s)| relative_entropy(&r, &s));
        match value {
            Ok(v) => {
                out.write(v);
                SfStatus::Ok
            }
            Err(e) => fail_with(&e),
        }
    })
}
