//! C ABI for the monge-core solvers.
//!
//! Configurations and results are opaque handles created and freed by this
//! library. Every fallible call returns a [`MongeStatus`]; on failure a
//! message is available from [`monge_last_error`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use monge_core::filter::JacobianMode;
use monge_core::harness::{solve_single, ExampleName, RunConfig, RunOutput, SchemeKind};
use monge_core::{ConeMass, Error};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MongeStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// The solve finished without meeting the residual tolerance. A result is
    /// still produced.
    NotConverged = 3,
    SolverError = 4,
    BufferTooSmall = 5,
    Panic = 6,
}

/// Values accepted for the `example` argument of [`monge_config_new`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MongeExample {
    C2 = 0,
    C1 = 1,
    Blowup = 2,
    Cone = 3,
    Eikonal1d = 4,
}

/// Values accepted for the `scheme` argument of [`monge_config_new`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MongeScheme {
    Monotone = 0,
    Filtered = 1,
}

/// Values accepted by [`monge_config_set_cone_mass`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MongeConeMass {
    Stencil = 0,
    Ball = 1,
}

/// Opaque run configuration.
pub struct MongeConfig(RunConfig);

/// Opaque solve result.
pub struct MongeResult(RunOutput);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    let c = CString::new(text).expect("interior nul bytes were replaced");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn fail(status: MongeStatus, msg: impl Into<String>) -> MongeStatus {
    set_error(msg);
    status
}

/// Runs `f`, turning a panic into [`MongeStatus::Panic`].
fn guarded(f: impl FnOnce() -> MongeStatus) -> MongeStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => fail(MongeStatus::Panic, "internal panic"),
    }
}

fn example_from(code: u32) -> Option<ExampleName> {
    Some(match code {
        0 => ExampleName::C2,
        1 => ExampleName::C1,
        2 => ExampleName::Blowup,
        3 => ExampleName::Cone,
        4 => ExampleName::Eikonal1d,
        _ => return None,
    })
}

fn scheme_from(code: u32) -> Option<SchemeKind> {
    match code {
        0 => Some(SchemeKind::Monotone),
        1 => Some(SchemeKind::Filtered),
        _ => None,
    }
}

fn error_status(e: &Error) -> MongeStatus {
    if e.is_config() {
        MongeStatus::InvalidArgument
    } else {
        MongeStatus::SolverError
    }
}

/// Message of the last failed call on this thread, or null if the last call
/// succeeded. The pointer stays valid until the next call into this library
/// on the same thread.
#[no_mangle]
pub extern "C" fn monge_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Creates a configuration with default solver settings. `example` is a
/// [`MongeExample`] value and `scheme` a [`MongeScheme`] value. Returns null
/// and sets the last error if an argument is invalid.
#[no_mangle]
pub extern "C" fn monge_config_new(example: u32, n: usize, width: u32, scheme: u32) -> *mut MongeConfig {
    clear_error();
    let (Some(example), Some(scheme)) = (example_from(example), scheme_from(scheme)) else {
        set_error(format!("unknown example {example} or scheme {scheme}"));
        return ptr::null_mut();
    };
    let config = RunConfig::new(example, n, width, scheme);
    if let Err(e) = config.validate() {
        set_error(e.to_string());
        return ptr::null_mut();
    }
    Box::into_raw(Box::new(MongeConfig(config)))
}

/// Frees a configuration. Null is ignored.
///
/// # Safety
/// `config` must be null or a pointer returned by [`monge_config_new`] that
/// has not been freed.
#[no_mangle]
pub unsafe extern "C" fn monge_config_free(config: *mut MongeConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Applies `edit` to a configuration and keeps the change only if the
/// result validates.
///
/// # Safety
/// `config` must be null or a live configuration handle.
unsafe fn edit_config(config: *mut MongeConfig, edit: impl FnOnce(&mut RunConfig)) -> MongeStatus {
    clear_error();
    let Some(cfg) = config.as_mut() else {
        return fail(MongeStatus::NullPointer, "null configuration");
    };
    guarded(|| {
        let mut next = cfg.0;
        edit(&mut next);
        match next.validate() {
            Ok(()) => {
                cfg.0 = next;
                MongeStatus::Ok
            }
            Err(e) => fail(MongeStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// Sets the filter scale. A non-positive value restores the default rule
/// `sqrt(h) + dtheta / 10`.
///
/// # Safety
/// `config` must be null or a live configuration handle.
#[no_mangle]
pub unsafe extern "C" fn monge_config_set_epsilon(config: *mut MongeConfig, epsilon: f64) -> MongeStatus {
    edit_config(config, |c| {
        c.epsilon = (epsilon > 0.0 || epsilon.is_nan()).then_some(epsilon)
    })
}

/// Sets the residual tolerance and the Newton iteration budget.
///
/// # Safety
/// `config` must be null or a live configuration handle.
#[no_mangle]
pub unsafe extern "C" fn monge_config_set_tolerance(
    config: *mut MongeConfig,
    residual_tol: f64,
    max_iter: usize,
) -> MongeStatus {
    edit_config(config, |c| {
        c.solver.residual_tol = residual_tol;
        c.solver.max_iter = max_iter;
    })
}

/// Selects the exact filtered Jacobian (`true`) or the modified one (`false`).
///
/// # Safety
/// `config` must be null or a live configuration handle.
#[no_mangle]
pub unsafe extern "C" fn monge_config_set_exact_jacobian(config: *mut MongeConfig, exact: bool) -> MongeStatus {
    edit_config(config, |c| {
        c.jacobian = if exact {
            JacobianMode::Exact
        } else {
            JacobianMode::Modified
        }
    })
}

/// Sets the cone's center source value from a [`MongeConeMass`] value.
///
/// # Safety
/// `config` must be null or a live configuration handle.
#[no_mangle]
pub unsafe extern "C" fn monge_config_set_cone_mass(config: *mut MongeConfig, mass: u32) -> MongeStatus {
    let mass = match mass {
        0 => ConeMass::Stencil,
        1 => ConeMass::Ball,
        other => return fail(MongeStatus::InvalidArgument, format!("unknown cone mass {other}")),
    };
    edit_config(config, |c| c.cone_mass = mass)
}

/// Solves the configured problem and stores a new result handle in `*out`.
///
/// Returns [`MongeStatus::Ok`] on convergence and [`MongeStatus::NotConverged`]
/// when Newton stopped early; both produce a result. On any other status
/// `*out` is set to null.
///
/// # Safety
/// `config` must be null or a live configuration handle and `out` must be
/// null or valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn monge_solve(config: *const MongeConfig, out: *mut *mut MongeResult) -> MongeStatus {
    clear_error();
    if out.is_null() {
        return fail(MongeStatus::NullPointer, "null output pointer");
    }
    *out = ptr::null_mut();
    let Some(cfg) = config.as_ref() else {
        return fail(MongeStatus::NullPointer, "null configuration");
    };
    guarded(|| match solve_single(&cfg.0) {
        Ok(output) => {
            let status = if output.report.converged {
                MongeStatus::Ok
            } else {
                set_error(format!(
                    "Newton stopped ({:?}) at residual {:.3e}",
                    output.report.termination, output.report.residual_norm
                ));
                MongeStatus::NotConverged
            };
            *out = Box::into_raw(Box::new(MongeResult(output)));
            status
        }
        Err(e) => fail(error_status(&e), e.to_string()),
    })
}

/// Frees a result. Null is ignored.
///
/// # Safety
/// `result` must be null or a pointer produced by [`monge_solve`] that has not
/// been freed.
#[no_mangle]
pub unsafe extern "C" fn monge_result_free(result: *mut MongeResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// # Safety
/// `result` must be null or a live result handle, and `out` null or writable.
unsafe fn read_result<T>(result: *const MongeResult, out: *mut T, get: impl FnOnce(&RunOutput) -> T) -> MongeStatus {
    clear_error();
    match (result.as_ref(), out.is_null()) {
        (Some(r), false) => {
            *out = get(&r.0);
            MongeStatus::Ok
        }
        _ => fail(MongeStatus::NullPointer, "null result or output pointer"),
    }
}

/// Max error against the exact solution.
///
/// # Safety
/// `result` must be null or a live result handle, and `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn monge_result_max_error(result: *const MongeResult, out: *mut f64) -> MongeStatus {
    read_result(result, out, |r| r.report.max_error.unwrap_or(f64::NAN))
}

/// Residual max-norm at the returned iterate.
///
/// # Safety
/// `result` must be null or a live result handle, and `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn monge_result_residual_norm(result: *const MongeResult, out: *mut f64) -> MongeStatus {
    read_result(result, out, |r| r.report.residual_norm)
}

/// Number of accepted Newton steps.
///
/// # Safety
/// `result` must be null or a live result handle, and `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn monge_result_iterations(result: *const MongeResult, out: *mut usize) -> MongeStatus {
    read_result(result, out, |r| r.report.iterations)
}

/// Whether the residual tolerance was met.
///
/// # Safety
/// `result` must be null or a live result handle, and `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn monge_result_converged(result: *const MongeResult, out: *mut bool) -> MongeStatus {
    read_result(result, out, |r| r.report.converged)
}

/// Number of solution values (`n * n` in 2D, `n` for the 1D example).
///
/// # Safety
/// `result` must be null or a live result handle, and `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn monge_result_len(result: *const MongeResult, out: *mut usize) -> MongeStatus {
    read_result(result, out, |r| r.solution.len())
}

/// Copies the solution, row by row with `x` varying fastest, into `buf`.
/// Fails with [`MongeStatus::BufferTooSmall`] if `capacity` is less than
/// [`monge_result_len`].
///
/// # Safety
/// `result` must be null or a live result handle, and `buf` must be null or
/// valid for `capacity` writes of `double`.
#[no_mangle]
pub unsafe extern "C" fn monge_result_copy_solution(
    result: *const MongeResult,
    buf: *mut f64,
    capacity: usize,
) -> MongeStatus {
    clear_error();
    let (Some(r), false) = (result.as_ref(), buf.is_null()) else {
        return fail(MongeStatus::NullPointer, "null result or buffer");
    };
    let u = &r.0.solution;
    if capacity < u.len() {
        return fail(
            MongeStatus::BufferTooSmall,
            format!("buffer holds {capacity} values, solution has {}", u.len()),
        );
    }
    ptr::copy_nonoverlapping(u.as_ptr(), buf, u.len());
    MongeStatus::Ok
}

/// The filter function: identity on `[-1, 1]`, zero for `|x| >= 2`.
#[no_mangle]
pub extern "C" fn monge_filter_s(x: f64) -> f64 {
    monge_core::filter_s(x)
}

/// Default filter scale `sqrt(h) + dtheta / 10`.
#[no_mangle]
pub extern "C" fn monge_epsilon_rule(h: f64, dtheta: f64) -> f64 {
    monge_core::epsilon_rule(h, dtheta)
}
