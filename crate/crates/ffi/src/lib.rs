//! C ABI for the entropy-dg library.
//!
//! The surface is deliberately small: pointwise kernels (logarithmic mean,
//! entropy maps, two-point fluxes), operator-identity certification, and an
//! opaque experiment-run handle driven by the same `key = value` config
//! text the CLI accepts. All functions return an [`EdgStatus`]; the last
//! error message is kept per thread and can be copied out with
//! [`edg_last_error_message`].

use entropy_dg::harness::{parse_config_str, run_experiment, ExperimentId, ExperimentSpec};
use entropy_dg::physics::{euler, log_mean, tadmor_check, Burgers, Euler1D, Euler2D, PhysicsModel};
use entropy_dg::refelem::{build_operator_set, verify_sbp, QuadMode, ReferenceElement};
use entropy_dg::Error;
use libc::{c_char, c_double, c_int, size_t};
use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::str::FromStr;

/// Status codes mirroring the library's error classes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgStatus {
    Ok = 0,
    Failure = 1,
    ConfigError = 2,
    BlowUp = 3,
    OracleFailure = 4,
    PlotError = 5,
    InvalidHandle = 6,
    Panic = 7,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let sanitized = msg.replace('\0', " ");
    LAST_ERROR.with(|e| {
        *e.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_of(err: &Error) -> EdgStatus {
    match err.exit_code() {
        2 => EdgStatus::ConfigError,
        3 => EdgStatus::BlowUp,
        4 => EdgStatus::OracleFailure,
        5 => EdgStatus::PlotError,
        _ => EdgStatus::Failure,
    }
}

fn guard<F: FnOnce() -> EdgStatus>(f: F) -> EdgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("internal panic");
            EdgStatus::Panic
        }
    }
}

/// Copy the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length in bytes.
///
/// # Safety
/// `buf` must point to at least `len` writable bytes, or be NULL (then only
/// the length is returned).
#[no_mangle]
pub unsafe extern "C" fn edg_last_error_message(buf: *mut c_char, len: size_t) -> size_t {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes_with_nul();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len);
            std::ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
            // always NUL-terminate
            *buf.add(n - 1) = 0;
        }
        bytes.len() - 1
    })
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn edg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Logarithmic mean with the Ismail-Roe series switch at `eps`. Returns NaN
/// (and sets the error message) for nonpositive input.
#[no_mangle]
pub extern "C" fn edg_log_mean(a: c_double, b: c_double, eps: c_double) -> c_double {
    match log_mean(a, b, eps) {
        Ok(v) => v,
        Err(e) => {
            set_error(&format!("{e}"));
            f64::NAN
        }
    }
}

/// Entropy-conservative two-point flux of the 1D Euler equations;
/// `ul`, `ur` are conserved triples, `fs` receives three components.
///
/// # Safety
/// `ul`, `ur` must point to 3 readable doubles and `fs` to 3 writable ones.
#[no_mangle]
pub unsafe extern "C" fn edg_euler1d_ec_flux(
    ul: *const c_double,
    ur: *const c_double,
    eps: c_double,
    fs: *mut c_double,
) -> EdgStatus {
    guard(|| {
        let l = std::slice::from_raw_parts(ul, 3);
        let r = std::slice::from_raw_parts(ur, 3);
        let model = Euler1D::with_log_eps(eps);
        if !model.is_admissible(l) || !model.is_admissible(r) {
            set_error("inadmissible state");
            return EdgStatus::Failure;
        }
        let out = std::slice::from_raw_parts_mut(fs, 3);
        euler::euler_ec_flux_1d(l, r, eps, out);
        EdgStatus::Ok
    })
}

/// Maximum relative Tadmor residual over random admissible state pairs for
/// one of the models `"burgers"`, `"euler1d"`, `"euler2d"`.
///
/// # Safety
/// `model` must be a NUL-terminated string and `out` a writable double.
#[no_mangle]
pub unsafe extern "C" fn edg_tadmor_check(
    model: *const c_char,
    trials: size_t,
    seed: u64,
    out: *mut c_double,
) -> EdgStatus {
    guard(|| {
        let Ok(name) = CStr::from_ptr(model).to_str() else {
            set_error("model name is not valid UTF-8");
            return EdgStatus::ConfigError;
        };
        let value = match name {
            "burgers" => tadmor_check(&Burgers, trials, seed),
            "euler1d" => tadmor_check(&Euler1D::default(), trials, seed),
            "euler2d" => tadmor_check(&Euler2D::default(), trials, seed),
            other => {
                set_error(&format!("unknown model `{other}`"));
                return EdgStatus::ConfigError;
            }
        };
        *out = value;
        EdgStatus::Ok
    })
}

/// Build the operator set for an element (`element`: `"interval"` or
/// `"triangle"`; `quad`: `"gll"`, `"gauss1"`, `"gauss2"`, `"tri2n"`) and
/// write the worst operator-identity residual to `out`.
///
/// # Safety
/// `element` and `quad` must be NUL-terminated strings; `out` must be a
/// writable double.
#[no_mangle]
pub unsafe extern "C" fn edg_ops_check(
    element: *const c_char,
    n: c_int,
    quad: *const c_char,
    out: *mut c_double,
) -> EdgStatus {
    guard(|| {
        let elem_name = match CStr::from_ptr(element).to_str() {
            Ok(s) => s,
            Err(_) => {
                set_error("element name is not valid UTF-8");
                return EdgStatus::ConfigError;
            }
        };
        let quad_name = CStr::from_ptr(quad).to_str().unwrap_or("");
        if n < 1 {
            set_error("degree must be positive");
            return EdgStatus::ConfigError;
        }
        let elem = match elem_name {
            "interval" => match quad_name.parse::<QuadMode>() {
                Ok(mode) => ReferenceElement::interval(n as usize, mode),
                Err(e) => {
                    set_error(&format!("{e}"));
                    return EdgStatus::ConfigError;
                }
            },
            "triangle" => ReferenceElement::triangle(n as usize),
            other => {
                set_error(&format!("unknown element `{other}`"));
                return EdgStatus::ConfigError;
            }
        };
        let elem = match elem {
            Ok(e) => e,
            Err(e) => {
                set_error(&format!("{e}"));
                return status_of(&e);
            }
        };
        match build_operator_set(&elem) {
            Ok(ops) => {
                *out = verify_sbp(&ops).max();
                EdgStatus::Ok
            }
            Err(e) => {
                set_error(&format!("{e}"));
                status_of(&e)
            }
        }
    })
}

/// An experiment run owned by the library.
pub struct EdgRun {
    spec: ExperimentSpec,
}

/// Create a run handle for `experiment` from config text (may be empty for
/// the experiment's defaults). Returns NULL on config errors.
///
/// # Safety
/// Both pointers must be NUL-terminated strings; `config` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn edg_run_new(
    experiment: *const c_char,
    config: *const c_char,
) -> *mut EdgRun {
    let result = catch_unwind(|| {
        let name = CStr::from_ptr(experiment).to_str().ok()?;
        let id = match ExperimentId::from_str(name) {
            Ok(id) => id,
            Err(e) => {
                set_error(&format!("{e}"));
                return None;
            }
        };
        let text = if config.is_null() {
            String::new()
        } else {
            CStr::from_ptr(config).to_str().ok()?.to_string()
        };
        match parse_config_str(&text, id) {
            Ok(spec) => Some(Box::into_raw(Box::new(EdgRun { spec }))),
            Err(e) => {
                set_error(&format!("{e}"));
                None
            }
        }
    });
    match result {
        Ok(Some(ptr)) => ptr,
        _ => std::ptr::null_mut(),
    }
}

/// Execute a run; artifacts are written under the configured output
/// directory.
///
/// # Safety
/// `run` must be a handle from [`edg_run_new`] that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn edg_run_execute(run: *mut EdgRun) -> EdgStatus {
    if run.is_null() {
        set_error("null run handle");
        return EdgStatus::InvalidHandle;
    }
    let spec = (*run).spec.clone();
    guard(|| match run_experiment(&spec) {
        Ok(()) => EdgStatus::Ok,
        Err(e) => {
            set_error(&format!("{e}"));
            status_of(&e)
        }
    })
}

/// Free a run handle. NULL is accepted.
///
/// # Safety
/// `run` must be NULL or a handle from [`edg_run_new`], freed exactly once.
#[no_mangle]
pub unsafe extern "C" fn edg_run_free(run: *mut EdgRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}
