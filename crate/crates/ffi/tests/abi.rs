// Copyright 2026 The spinfriction Authors
// SPDX-License-Identifier: Apache-2.0

use std::ffi::CStr;
use std::ptr;

use spinfriction::protocol::run_protocol;
use spinfriction::ProtocolConfig;
use spinfriction_ffi::*;

fn default_config() -> SfConfig {
    let mut cfg = unsafe { std::mem::zeroed() };
    assert_eq!(unsafe { sf_config_default(&mut cfg) }, SfStatus::Ok);
    cfg
}

fn last_error() -> Option<String> {
    let p = sf_last_error_message();
    (!p.is_null()).then(|| unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned())
}

struct Handle(*mut SfProtocolResult);

impl Drop for Handle {
    fn drop(&mut self) {
        unsafe { sf_result_free(self.0) };
    }
}

fn run(cfg: &SfConfig) -> Result<Handle, (SfStatus, String)> {
    let mut out = ptr::null_mut();
    match unsafe { sf_run_protocol(cfg, &mut out) } {
        SfStatus::Ok => Ok(Handle(out)),
        status => {
            assert!(out.is_null());
            Err((status, last_error().unwrap()))
        }
    }
}

#[test]
fn default_config_round_trips() {
    let cfg = default_config();
    assert_eq!(cfg, SfConfig::from(&ProtocolConfig::default()));
    assert_eq!(ProtocolConfig::try_from(&cfg).unwrap(), ProtocolConfig::default());
}

#[test]
fn handle_matches_library_result() {
    let mut cfg = default_config();
    cfg.pulse_kind = SF_PULSE_POWER_LAW;
    cfg.pulse_exponent = 2.0;
    cfg.steps_per_leg = 5_000;
    let handle = run(&cfg).unwrap();
    assert!(last_error().is_none());
    let direct = run_protocol(&ProtocolConfig::try_from(&cfg).unwrap()).unwrap();

    let mut report = SfReport::default();
    assert_eq!(unsafe { sf_result_report(handle.0, &mut report) }, SfStatus::Ok);
    assert_eq!(report.relative_entropy, direct.report.relative_entropy);
    assert_eq!(report.heat_to_bath, -report.friction_work);
    assert_eq!(report.integrator_error, direct.integrator_error);

    let mut m = [0.0; SF_MATRIX_LEN];
    for (which, rho) in [(SF_STATE_INITIAL, direct.rho0), (SF_STATE_MIDWAY, direct.rho1), (SF_STATE_FINAL, direct.rho2)] {
        assert_eq!(unsafe { sf_result_state(handle.0, which, m.as_mut_ptr()) }, SfStatus::Ok);
        let flat: Vec<f64> = rho.matrix().entries().flat_map(|z| [z.re, z.im]).collect();
        assert_eq!(m.to_vec(), flat);
    }
    assert_eq!(unsafe { sf_result_state(handle.0, 3, m.as_mut_ptr()) }, SfStatus::InvalidArgument);

    for (leg, traj) in [(SF_LEG_FORWARD, &direct.forward_trajectory), (SF_LEG_BACKWARD, &direct.backward_trajectory)] {
        let mut len = 0;
        assert_eq!(unsafe { sf_result_trajectory_len(handle.0, leg, &mut len) }, SfStatus::Ok);
        assert_eq!(len, traj.len());
        let mut buf = vec![SfBlochSample::default(); len];
        assert_eq!(
            unsafe { sf_result_trajectory(handle.0, leg, buf.as_mut_ptr(), len - 1) },
            SfStatus::BufferTooSmall
        );
        assert!(buf.iter().all(|s| *s == SfBlochSample::default()));
        assert_eq!(unsafe { sf_result_trajectory(handle.0, leg, buf.as_mut_ptr(), len) }, SfStatus::Ok);
        for (b, s) in buf.iter().zip(&traj.samples) {
            let r = s.state.bloch();
            assert_eq!((b.t, b.rx, b.ry, b.rz, b.field), (s.t, r.rx, r.ry, r.rz, s.field));
        }
    }
}

#[test]
fn sweep_and_evaluate_agree() {
    let mut cfg = default_config();
    cfg.steps_per_leg = 4_000;
    let taus = [3.0, 10.0, 24.5];
    let (mut s, mut w) = ([0.0; 3], [0.0; 3]);
    let status = unsafe { sf_sweep_tau(&cfg, taus.as_ptr(), taus.len(), s.as_mut_ptr(), w.as_mut_ptr()) };
    assert_eq!(status, SfStatus::Ok);
    for (i, &tau) in taus.iter().enumerate() {
        let mut report = SfReport::default();
        let single = SfConfig { tau, ..cfg };
        assert_eq!(unsafe { sf_evaluate(&single, &mut report) }, SfStatus::Ok);
        assert_eq!(report.relative_entropy, s[i]);
        assert_eq!(report.friction_work, w[i]);
    }
    let mut only_s = [0.0; 3];
    let status = unsafe { sf_sweep_tau(&cfg, taus.as_ptr(), 3, only_s.as_mut_ptr(), ptr::null_mut()) };
    assert_eq!(status, SfStatus::Ok);
    assert_eq!(only_s, s);
    assert_eq!(unsafe { sf_sweep_tau(&cfg, ptr::null(), 0, ptr::null_mut(), ptr::null_mut()) }, SfStatus::Ok);
}

#[test]
fn sweep_error_names_the_failing_tau() {
    let mut cfg = default_config();
    cfg.steps_per_leg = 100;
    let taus = [1.0, 500.0];
    let mut s = [0.0; 2];
    let status = unsafe { sf_sweep_tau(&cfg, taus.as_ptr(), 2, s.as_mut_ptr(), ptr::null_mut()) };
    assert_eq!(status, SfStatus::Convergence);
    assert!(last_error().unwrap().contains("tau = 500"));
}

#[test]
fn invalid_input_maps_to_status_codes() {
    let mut cfg = default_config();
    cfg.beta = -1.0;
    let (status, msg) = run(&cfg).err().unwrap();
    assert_eq!(status, SfStatus::InvalidArgument);
    assert!(msg.contains("beta"), "{msg}");

    let mut cfg = default_config();
    cfg.pulse_kind = 7;
    assert_eq!(run(&cfg).err().unwrap().0, SfStatus::InvalidArgument);

    let mut cfg = default_config();
    cfg.steps_per_leg = 100;
    cfg.tau = 500.0;
    assert_eq!(run(&cfg).err().unwrap().0, SfStatus::Convergence);

    let mut out = ptr::null_mut();
    assert_eq!(unsafe { sf_run_protocol(ptr::null(), &mut out) }, SfStatus::NullPointer);
    assert_eq!(unsafe { sf_config_default(ptr::null_mut()) }, SfStatus::NullPointer);
    assert!(last_error().unwrap().contains("`out`"));
    unsafe { sf_result_free(ptr::null_mut()) };
}

#[test]
fn relative_entropy_of_raw_matrices() {
    let rho = [0.9, 0.0, 0.0, 0.0, 0.0, 0.0, 0.1, 0.0];
    let mixed = [0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.5, 0.0];
    let pure = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
    let mut s = 0.0;
    assert_eq!(unsafe { sf_relative_entropy(rho.as_ptr(), mixed.as_ptr(), &mut s) }, SfStatus::Ok);
    assert!((s - 0.368_064_207_168_497_1).abs() < 1e-12);
    assert_eq!(unsafe { sf_relative_entropy(mixed.as_ptr(), pure.as_ptr(), &mut s) }, SfStatus::Divergent);

    let not_hermitian = [0.5, 0.0, 0.2, 0.0, 0.0, 0.0, 0.5, 0.0];
    assert_eq!(
        unsafe { sf_relative_entropy(not_hermitian.as_ptr(), mixed.as_ptr(), &mut s) },
        SfStatus::InvalidArgument
    );
}

#[test]
fn errors_are_thread_local() {
    let mut cfg = default_config();
    cfg.beta = f64::NAN;
    assert!(run(&cfg).is_err());
    std::thread::spawn(|| assert!(last_error().is_none())).join().unwrap();
    assert!(last_error().is_some());
    let v = unsafe { CStr::from_ptr(sf_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
