use std::ffi::CStr;
use std::ptr;

use monge_ffi::*;

fn last_error() -> Option<String> {
    let p = monge_last_error();
    (!p.is_null()).then(|| unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned())
}

#[test]
fn solves_c2_through_handles() {
    let cfg = monge_config_new(MongeExample::C2 as u32, 31, 2, MongeScheme::Filtered as u32);
    assert!(!cfg.is_null());
    let mut res = ptr::null_mut();
    unsafe {
        assert_eq!(monge_solve(cfg, &mut res), MongeStatus::Ok);
        assert!(last_error().is_none());

        let mut err = 0.0;
        assert_eq!(monge_result_max_error(res, &mut err), MongeStatus::Ok);
        assert!(err > 0.0 && err < 1e-4, "{err}");
        let mut converged = false;
        assert_eq!(monge_result_converged(res, &mut converged), MongeStatus::Ok);
        assert!(converged);
        let mut iters = 0;
        assert_eq!(monge_result_iterations(res, &mut iters), MongeStatus::Ok);
        assert!(iters >= 1);
        let mut resid = 1.0;
        assert_eq!(monge_result_residual_norm(res, &mut resid), MongeStatus::Ok);
        assert!(resid <= 1e-8);

        let mut len = 0;
        assert_eq!(monge_result_len(res, &mut len), MongeStatus::Ok);
        assert_eq!(len, 31 * 31);
        let mut small = vec![0.0; 10];
        assert_eq!(
            monge_result_copy_solution(res, small.as_mut_ptr(), small.len()),
            MongeStatus::BufferTooSmall
        );
        assert!(last_error().unwrap().contains("961"));
        let mut u = vec![0.0; len];
        assert_eq!(monge_result_copy_solution(res, u.as_mut_ptr(), len), MongeStatus::Ok);
        // Corner (0, 0) carries boundary data exp(|x - x0|^2 / 2) with |x - x0|^2 = 1/2.
        assert!((u[0] - 0.25f64.exp()).abs() < 1e-14);

        monge_result_free(res);
        monge_config_free(cfg);
    }
}

#[test]
fn invalid_arguments() {
    assert!(monge_config_new(9, 31, 2, 0).is_null());
    assert!(last_error().unwrap().contains("unknown"));
    assert!(monge_config_new(0, 31, 7, 0).is_null());
    assert!(last_error().unwrap().contains("width"));
    assert!(monge_config_new(MongeExample::Cone as u32, 30, 2, 0).is_null());
    assert!(last_error().unwrap().contains("odd"));

    let cfg = monge_config_new(0, 15, 1, 0);
    unsafe {
        assert_eq!(monge_config_set_tolerance(cfg, -1.0, 10), MongeStatus::InvalidArgument);
        assert_eq!(monge_config_set_epsilon(cfg, f64::NAN), MongeStatus::InvalidArgument);
        assert_eq!(monge_config_set_cone_mass(cfg, 5), MongeStatus::InvalidArgument);
        assert_eq!(monge_config_set_epsilon(cfg, 0.3), MongeStatus::Ok);
        assert_eq!(monge_config_set_epsilon(cfg, 0.0), MongeStatus::Ok);
        assert_eq!(monge_config_set_exact_jacobian(cfg, true), MongeStatus::Ok);
        assert_eq!(
            monge_config_set_cone_mass(cfg, MongeConeMass::Ball as u32),
            MongeStatus::Ok
        );
        assert!(last_error().is_none());
        monge_config_free(cfg);
    }
}

#[test]
fn null_handles() {
    unsafe {
        let mut res = ptr::null_mut();
        assert_eq!(monge_solve(ptr::null(), &mut res), MongeStatus::NullPointer);
        assert!(res.is_null());
        let cfg = monge_config_new(0, 15, 1, 0);
        assert_eq!(monge_solve(cfg, ptr::null_mut()), MongeStatus::NullPointer);
        let mut x = 0.0;
        assert_eq!(monge_result_max_error(ptr::null(), &mut x), MongeStatus::NullPointer);
        assert_eq!(monge_config_set_epsilon(ptr::null_mut(), 0.1), MongeStatus::NullPointer);
        monge_config_free(ptr::null_mut());
        monge_result_free(ptr::null_mut());
        monge_config_free(cfg);
    }
}

#[test]
fn budget_exhaustion_still_returns_a_result() {
    let cfg = monge_config_new(MongeExample::C2 as u32, 31, 2, MongeScheme::Monotone as u32);
    unsafe {
        assert_eq!(monge_config_set_tolerance(cfg, 1e-14, 1), MongeStatus::Ok);
        let mut res = ptr::null_mut();
        assert_eq!(monge_solve(cfg, &mut res), MongeStatus::NotConverged);
        assert!(!res.is_null());
        assert!(last_error().unwrap().contains("residual"));
        let mut converged = true;
        monge_result_converged(res, &mut converged);
        assert!(!converged);
        monge_result_free(res);
        monge_config_free(cfg);
    }
}

#[test]
fn eikonal_result_is_one_dimensional() {
    let cfg = monge_config_new(MongeExample::Eikonal1d as u32, 21, 2, MongeScheme::Filtered as u32);
    unsafe {
        let mut res = ptr::null_mut();
        assert_eq!(monge_solve(cfg, &mut res), MongeStatus::Ok);
        let mut len = 0;
        monge_result_len(res, &mut len);
        assert_eq!(len, 21);
        monge_result_free(res);
        monge_config_free(cfg);
    }
}

#[test]
fn scalar_helpers() {
    assert_eq!(monge_filter_s(0.5), 0.5);
    assert_eq!(monge_filter_s(-1.5), -0.5);
    assert_eq!(monge_filter_s(3.0), 0.0);
    let e = monge_epsilon_rule(0.01, 0.5);
    assert!((e - 0.15).abs() < 1e-15);
}

#[test]
fn header_declares_the_api() {
    let header = include_str!("../include/monge.h");
    for name in [
        "monge_config_new",
        "monge_solve",
        "monge_result_copy_solution",
        "monge_last_error",
        "MONGE_STATUS_NOT_CONVERGED",
        "MONGE_EXAMPLE_EIKONAL1D",
        "typedef struct MongeConfig MongeConfig",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
