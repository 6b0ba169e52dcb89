//! C ABI over the core library: opaque instance handles, status codes that
//! mirror the CLI exit codes, and JSON strings for structured reports.
//!
//! Contract highlights (see `include/latbound.h` for the C declarations):
//!
//! * Every entry point catches panics at the boundary and reports them as
//!   [`LbStatus::InternalError`]; nothing unwinds into the caller.
//! * Failure details are retrievable with `lb_last_error_message`, whose
//!   buffer is thread-local and valid until the next failing call on the
//!   same thread.
//! * Strings handed out by `lb_*_json` functions are owned by the caller
//!   and must be released with `lb_string_free`; instances with
//!   `lb_instance_free`. Both free functions accept null.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use latbound::enumeration::count_ball;
use latbound::error::{Error, Result};
use latbound::instance::InstanceFile;
use latbound::report::{
    to_json_string, translation_json, BhwJson, StrongJson, ViaStrongJson,
};
use latbound::slicing::{verify_strong, verify_theorem1_via_strong};
use latbound::translation::{default_t_samples, translate_spheres, verify_translation};

/// Outcome of a call. Numeric values match the CLI exit codes, with
/// boundary-specific `InternalError` on top.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum LbStatus {
    /// The call succeeded and every verification it ran passed.
    Ok = 0,
    /// The call ran to completion but a verification check failed; the
    /// report output is still produced.
    VerifyFailed = 1,
    /// Malformed input, a null pointer, or an exceeded capacity limit.
    InvalidInput = 2,
    /// The instance violates a theorem hypothesis (sphere separation).
    HypothesisViolation = 3,
    /// A panic was caught at the boundary; consult the error message.
    InternalError = 4,
}

/// Opaque parsed instance handle.
pub struct LbInstance {
    file: InstanceFile,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let clean: String = msg.chars().filter(|&c| c != '\0').collect();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(clean).expect("nul bytes removed");
    });
}

fn status_of(e: &Error) -> LbStatus {
    match e.exit_code() {
        1 => LbStatus::VerifyFailed,
        3 => LbStatus::HypothesisViolation,
        _ => LbStatus::InvalidInput,
    }
}

/// Runs a fallible body with panic containment and error capture.
fn guard(body: impl FnOnce() -> Result<LbStatus>) -> LbStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(status)) => status,
        Ok(Err(e)) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic with non-string payload".to_owned());
            set_error(&format!("internal error: {msg}"));
            LbStatus::InternalError
        }
    }
}

fn null_arg(name: &str) -> Error {
    Error::InvalidInput(format!("{name} must not be null"))
}

/// Writes `json` into `*out` as a caller-owned C string.
fn emit_string(json: String, out: *mut *mut c_char) -> Result<()> {
    let c = CString::new(json)
        .map_err(|_| Error::InvalidInput("report contains a nul byte".to_owned()))?;
    unsafe { *out = c.into_raw() };
    Ok(())
}

/// Version of the library as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn lb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message for the most recent failure on this thread. Never null; empty
/// before the first failure. Valid until the next failing call here.
#[no_mangle]
pub extern "C" fn lb_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Parses an instance from JSON text into a new handle.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be a valid location
/// to store the handle.
#[no_mangle]
pub unsafe extern "C" fn lb_instance_parse_json(
    json: *const c_char,
    out: *mut *mut LbInstance,
) -> LbStatus {
    guard(|| {
        if json.is_null() {
            return Err(null_arg("json"));
        }
        if out.is_null() {
            return Err(null_arg("out"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|_| Error::InvalidInput("json is not valid utf-8".to_owned()))?;
        let file = InstanceFile::parse(text)?;
        *out = Box::into_raw(Box::new(LbInstance { file }));
        Ok(LbStatus::Ok)
    })
}

/// Releases a handle from `lb_instance_parse_json`. Null is a no-op.
///
/// # Safety
/// `instance` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lb_instance_free(instance: *mut LbInstance) {
    if !instance.is_null() {
        drop(Box::from_raw(instance));
    }
}

unsafe fn borrow<'a>(instance: *const LbInstance) -> Result<&'a InstanceFile> {
    instance
        .as_ref()
        .map(|h| &h.file)
        .ok_or_else(|| null_arg("instance"))
}

/// Total lattice-point count over all bodies of the instance.
///
/// # Safety
/// `instance` must be a live handle; `out_total` a valid write location.
#[no_mangle]
pub unsafe extern "C" fn lb_count(
    instance: *const LbInstance,
    out_total: *mut u64,
) -> LbStatus {
    guard(|| {
        let file = borrow(instance)?;
        if out_total.is_null() {
            return Err(null_arg("out_total"));
        }
        let lattice = file.lattice()?;
        let mut total = 0u64;
        for ball in file.balls()? {
            total += count_ball(&lattice, &ball)?;
        }
        *out_total = total;
        Ok(LbStatus::Ok)
    })
}

/// Verifies `count <= prod q_i` and writes the JSON report. With
/// `via_strong` the check replays the full recursive proof instead.
/// Returns `Ok` when the verification passes, `VerifyFailed` when the
/// report says no (the report is still written).
///
/// # Safety
/// `instance` must be a live handle; `out_json` a valid write location.
#[no_mangle]
pub unsafe extern "C" fn lb_verify_bhw_json(
    instance: *const LbInstance,
    via_strong: bool,
    out_json: *mut *mut c_char,
) -> LbStatus {
    guard(|| {
        let file = borrow(instance)?;
        if out_json.is_null() {
            return Err(null_arg("out_json"));
        }
        let lattice = file.lattice()?;
        let ball = file.ball()?;
        let passed = if via_strong {
            let report = verify_theorem1_via_strong(&lattice, &ball)?;
            emit_string(to_json_string(&ViaStrongJson::from(&report)), out_json)?;
            report.passed
        } else {
            let report = latbound::bhw::verify_theorem1(&lattice, &ball)?;
            emit_string(to_json_string(&BhwJson::from(&report)), out_json)?;
            report.holds && report.holds_first
        };
        Ok(if passed {
            LbStatus::Ok
        } else {
            LbStatus::VerifyFailed
        })
    })
}

/// Runs the recursive sliced verification and writes the JSON report.
///
/// # Safety
/// `instance` must be a live handle; `out_json` a valid write location.
#[no_mangle]
pub unsafe extern "C" fn lb_verify_strong_json(
    instance: *const LbInstance,
    out_json: *mut *mut c_char,
) -> LbStatus {
    guard(|| {
        let file = borrow(instance)?;
        if out_json.is_null() {
            return Err(null_arg("out_json"));
        }
        let report = verify_strong(&file.strong_instance()?)?;
        emit_string(to_json_string(&StrongJson::from(&report)), out_json)?;
        Ok(if report.passed {
            LbStatus::Ok
        } else {
            LbStatus::VerifyFailed
        })
    })
}

/// Translates the instance's sphere pack, re-verifies it against the
/// default scale samples, and writes the JSON report.
///
/// # Safety
/// `instance` must be a live handle; `out_json` a valid write location.
#[no_mangle]
pub unsafe extern "C" fn lb_translate_json(
    instance: *const LbInstance,
    out_json: *mut *mut c_char,
) -> LbStatus {
    guard(|| {
        let file = borrow(instance)?;
        if out_json.is_null() {
            return Err(null_arg("out_json"));
        }
        let pack = file.sphere_pack()?;
        let result = translate_spheres(&pack)?;
        let report = verify_translation(&pack, &result, &default_t_samples())?;
        let json = translation_json(&result, &report);
        let passed = json.passed;
        emit_string(to_json_string(&json), out_json)?;
        Ok(if passed {
            LbStatus::Ok
        } else {
            LbStatus::VerifyFailed
        })
    })
}

/// Releases a string from an `lb_*_json` call. Null is a no-op.
///
/// # Safety
/// `s` must be null or a string not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lb_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
