//! C ABI for the `symsep` crate.
//!
//! Objects cross the boundary as opaque handles that the caller releases with
//! the matching `*_free` function. Every fallible call returns a
//! [`SymsepStatus`]; on failure [`symsep_last_error`] describes the problem
//! for the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use symsep::mechanics::PhasePoint;
use symsep::stackel::instances::shipped;
use symsep::stackel::{stackel_constants, StackelError, StackelSystem};
use symsep::verify::{self, CheckReport, ConfigError, RunConfig, Status};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymsepStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Domain = 4,
    Config = 5,
    Io = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

/// A parsed Staeckel system.
pub struct SymsepStackel(StackelSystem);

/// Reports of one `verify` run together with their JSON rendering.
pub struct SymsepReport {
    reports: Vec<CheckReport>,
    json: CString,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn fail(status: SymsepStatus, msg: impl Into<String>) -> SymsepStatus {
    set_error(msg);
    status
}

fn guarded(f: impl FnOnce() -> SymsepStatus) -> SymsepStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(SymsepStatus::Panic, "internal panic"))
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, SymsepStatus> {
    if p.is_null() {
        return Err(fail(SymsepStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(SymsepStatus::InvalidUtf8, "string argument is not UTF-8"))
}

fn stackel_status(e: &StackelError) -> SymsepStatus {
    match e {
        StackelError::Parse { .. } | StackelError::Format { .. } => SymsepStatus::Parse,
        StackelError::Io(_) => SymsepStatus::Io,
        _ => SymsepStatus::Domain,
    }
}

/// Message of the last failed call on this thread; empty if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn symsep_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn symsep_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses a Staeckel system from the text data format.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn symsep_stackel_parse(text: *const c_char, out: *mut *mut SymsepStackel) -> SymsepStatus {
    guarded(|| {
        if out.is_null() {
            return fail(SymsepStatus::NullPointer, "null output pointer");
        }
        let text = match str_arg(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match StackelSystem::parse(text) {
            Ok(sys) => {
                *out = Box::into_raw(Box::new(SymsepStackel(sys)));
                SymsepStatus::Ok
            }
            Err(e) => fail(stackel_status(&e), e.to_string()),
        }
    })
}

/// Loads one of the systems shipped with the library by name.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn symsep_stackel_shipped(name: *const c_char, out: *mut *mut SymsepStackel) -> SymsepStatus {
    guarded(|| {
        if out.is_null() {
            return fail(SymsepStatus::NullPointer, "null output pointer");
        }
        let name = match str_arg(name) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match shipped(name) {
            Ok(sys) => {
                *out = Box::into_raw(Box::new(SymsepStackel(sys)));
                SymsepStatus::Ok
            }
            Err(e) => fail(stackel_status(&e), e.to_string()),
        }
    })
}

/// # Safety
/// `handle` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn symsep_stackel_free(handle: *mut SymsepStackel) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Number of coordinates of the system.
///
/// # Safety
/// `handle` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn symsep_stackel_dim(handle: *const SymsepStackel, out: *mut usize) -> SymsepStatus {
    if handle.is_null() || out.is_null() {
        return fail(SymsepStatus::NullPointer, "null argument");
    }
    *out = (*handle).0.m();
    SymsepStatus::Ok
}

/// Whether every entry of row `i` of the Staeckel matrix depends on `x_i` only.
///
/// # Safety
/// `handle` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn symsep_stackel_is_separated(handle: *const SymsepStackel, out: *mut bool) -> SymsepStatus {
    if handle.is_null() || out.is_null() {
        return fail(SymsepStatus::NullPointer, "null argument");
    }
    *out = (*handle).0.is_separated();
    SymsepStatus::Ok
}

/// The constants `c_1..c_m` at the phase point `(x, p)`; all three arrays
/// have length `len`, which must equal the system's dimension.
///
/// # Safety
/// `x`, `p` and `out` must point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn symsep_stackel_constants(
    handle: *const SymsepStackel,
    x: *const f64,
    p: *const f64,
    len: usize,
    out: *mut f64,
) -> SymsepStatus {
    guarded(|| {
        if handle.is_null() || x.is_null() || p.is_null() || out.is_null() {
            return fail(SymsepStatus::NullPointer, "null argument");
        }
        let sys = &(*handle).0;
        if len != sys.m() {
            return fail(SymsepStatus::BufferTooSmall, format!("expected length {}, got {len}", sys.m()));
        }
        let at = PhasePoint::new(
            std::slice::from_raw_parts(x, len).to_vec(),
            std::slice::from_raw_parts(p, len).to_vec(),
        );
        match stackel_constants(sys, &at) {
            Ok(c) => {
                std::slice::from_raw_parts_mut(out, len).copy_from_slice(c.as_slice());
                SymsepStatus::Ok
            }
            Err(e) => fail(stackel_status(&e), e.to_string()),
        }
    })
}

/// Runs one verification check, or all of them for `"all"`, with default
/// tolerances and sample counts.
///
/// # Safety
/// `check_id` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn symsep_verify(check_id: *const c_char, seed: u64, out: *mut *mut SymsepReport) -> SymsepStatus {
    guarded(|| {
        if out.is_null() {
            return fail(SymsepStatus::NullPointer, "null output pointer");
        }
        let id = match str_arg(check_id) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let cfg = RunConfig::new(seed);
        let reports: Result<Vec<CheckReport>, ConfigError> = if id == "all" {
            verify::run_all(&cfg)
        } else {
            verify::run_check(id, &cfg).map(|r| vec![r])
        };
        match reports {
            Ok(reports) => {
                let json = CString::new(verify::render_json(seed, &reports)).expect("JSON has no NUL");
                *out = Box::into_raw(Box::new(SymsepReport { reports, json }));
                SymsepStatus::Ok
            }
            Err(e) => fail(SymsepStatus::Config, e.to_string()),
        }
    })
}

/// True when no check in the report failed.
///
/// # Safety
/// `handle` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn symsep_report_passed(handle: *const SymsepReport, out: *mut bool) -> SymsepStatus {
    if handle.is_null() || out.is_null() {
        return fail(SymsepStatus::NullPointer, "null argument");
    }
    *out = (*handle).reports.iter().all(|r| r.status != Status::Fail);
    SymsepStatus::Ok
}

/// The JSON report, owned by the handle.
///
/// # Safety
/// `handle` must be valid; the string lives until the handle is freed.
#[no_mangle]
pub unsafe extern "C" fn symsep_report_json(handle: *const SymsepReport) -> *const c_char {
    if handle.is_null() {
        set_error("null argument");
        return ptr::null();
    }
    (*handle).json.as_ptr()
}

/// # Safety
/// `handle` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn symsep_report_free(handle: *mut SymsepReport) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}
