//! C interface to the toposqt engine.
//!
//! Results cross the boundary as JSON documents in `char*` buffers owned by
//! the library; release them with `tq_string_free`. A scenario is an opaque
//! handle created by `tq_scenario_load` or `tq_scenario_from_json` and
//! released with `tq_scenario_free`.
//!
//! Every fallible call returns a `TqStatus`. On anything other than
//! `TQ_STATUS_OK` the output pointer is left untouched and `tq_last_error`
//! describes the failure as a JSON document of the same shape the command
//! line tool prints.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use serde_json::json;
use toposqt::commands::{self, Output};
use toposqt::scenario::Scenario;
use toposqt::Error;

/// Outcome of a call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TqStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Malformed JSON or basis-file text; the error carries line and column.
    Parse = 3,
    /// Well-formed input that names or describes something invalid.
    Validation = 4,
    Io = 5,
    /// The computation itself was rejected (unknown context, bad threshold, ...).
    Domain = 6,
    /// Internal failure; the library caught a panic.
    Internal = 7,
}

/// Validated scenario: operators, states, propositions and the context poset.
pub struct TqScenario {
    inner: Scenario,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure {
    status: TqStatus,
    body: serde_json::Value,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Parse { .. } => TqStatus::Parse,
            Error::Validation { .. } => TqStatus::Validation,
            Error::Io(_) => TqStatus::Io,
            _ => TqStatus::Domain,
        };
        Failure { status, body: commands::error_json(&e) }
    }
}

impl Failure {
    fn simple(status: TqStatus, kind: &str, message: &str) -> Self {
        Failure { status, body: json!({ "error": { "kind": kind, "message": message } }) }
    }
}

fn set_last_error(body: Option<serde_json::Value>) {
    let text = body.map(|b| CString::new(b.to_string()).expect("JSON has no interior NUL"));
    LAST_ERROR.with(|cell| *cell.borrow_mut() = text);
}

fn guard<T>(out: *mut T, f: impl FnOnce() -> Result<T, Failure>) -> TqStatus {
    if out.is_null() {
        set_last_error(Some(json!({ "error": { "kind": "NullArgument", "message": "output pointer is null" } })));
        return TqStatus::NullArgument;
    }
    let result = catch_unwind(AssertUnwindSafe(f))
        .unwrap_or_else(|_| Err(Failure::simple(TqStatus::Internal, "Internal", "internal error")));
    match result {
        Ok(v) => {
            // SAFETY: checked non-null above; the caller promises it is writable.
            unsafe { out.write(v) };
            set_last_error(None);
            TqStatus::Ok
        }
        Err(f) => {
            set_last_error(Some(f.body));
            f.status
        }
    }
}

/// # Safety
/// `p` is null or points to a NUL-terminated string.
unsafe fn required<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    optional(p, what)?.ok_or_else(|| Failure::simple(TqStatus::NullArgument, "NullArgument", &format!("{what} is null")))
}

/// # Safety
/// `p` is null or points to a NUL-terminated string.
unsafe fn optional<'a>(p: *const c_char, what: &str) -> Result<Option<&'a str>, Failure> {
    if p.is_null() {
        return Ok(None);
    }
    CStr::from_ptr(p)
        .to_str()
        .map(Some)
        .map_err(|_| Failure::simple(TqStatus::InvalidUtf8, "InvalidUtf8", &format!("{what} is not valid UTF-8")))
}

/// # Safety
/// `sc` is null or a live handle from this library.
unsafe fn scenario<'a>(sc: *const TqScenario) -> Result<&'a Scenario, Failure> {
    sc.as_ref()
        .map(|s| &s.inner)
        .ok_or_else(|| Failure::simple(TqStatus::NullArgument, "NullArgument", "scenario is null"))
}

fn to_c(output: Output) -> *mut c_char {
    CString::new(output.json_text()).expect("JSON has no interior NUL").into_raw()
}

/// Load and validate a scenario file.
///
/// # Safety
/// `path` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn tq_scenario_load(path: *const c_char, out: *mut *mut TqScenario) -> TqStatus {
    guard(out, || {
        let path = required(path, "path")?;
        let inner = Scenario::load(Path::new(path))?;
        Ok(Box::into_raw(Box::new(TqScenario { inner })))
    })
}

/// Validate a scenario given as JSON text.
///
/// # Safety
/// `text` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn tq_scenario_from_json(text: *const c_char, out: *mut *mut TqScenario) -> TqStatus {
    guard(out, || {
        let inner = Scenario::from_json(required(text, "text")?)?;
        Ok(Box::into_raw(Box::new(TqScenario { inner })))
    })
}

/// Release a scenario. Null is ignored.
///
/// # Safety
/// `sc` is null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tq_scenario_free(sc: *mut TqScenario) {
    if !sc.is_null() {
        drop(Box::from_raw(sc));
    }
}

/// Number of contexts in the scenario's poset, or 0 for a null handle.
///
/// # Safety
/// `sc` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tq_scenario_context_count(sc: *const TqScenario) -> usize {
    sc.as_ref().map_or(0, |s| s.inner.poset.len())
}

/// The context poset with atoms, covers and maximal elements.
///
/// # Safety
/// `sc` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn tq_contexts(sc: *const TqScenario, out: *mut *mut c_char) -> TqStatus {
    guard(out, || Ok(to_c(commands::contexts(scenario(sc)?))))
}

/// Outer (or inner) daseinisation of a proposition, projector or operator.
/// `at` may be null for every context.
///
/// # Safety
/// String arguments are NUL-terminated or, where optional, null.
#[no_mangle]
pub unsafe extern "C" fn tq_daseinise(
    sc: *const TqScenario,
    name: *const c_char,
    inner: bool,
    at: *const c_char,
    out: *mut *mut c_char,
) -> TqStatus {
    guard(out, || {
        let sc = scenario(sc)?;
        Ok(to_c(commands::daseinise(sc, required(name, "name")?, inner, optional(at, "at")?)?))
    })
}

/// Sieve-valued truth value. `at` and `r` may be null; `r` is a rational
/// such as "3/4" and selects the probabilistic truth object.
///
/// # Safety
/// String arguments are NUL-terminated or, where optional, null.
#[no_mangle]
pub unsafe extern "C" fn tq_truth_value(
    sc: *const TqScenario,
    prop: *const c_char,
    state: *const c_char,
    at: *const c_char,
    r: *const c_char,
    out: *mut *mut c_char,
) -> TqStatus {
    guard(out, || {
        let sc = scenario(sc)?;
        let json = commands::truth_value(
            sc,
            required(prop, "prop")?,
            required(state, "state")?,
            optional(at, "at")?,
            optional(r, "r")?,
        )?;
        Ok(to_c(json))
    })
}

/// Pseudo-state of a pure state.
///
/// # Safety
/// String arguments are NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn tq_pseudo_state(
    sc: *const TqScenario,
    state: *const c_char,
    out: *mut *mut c_char,
) -> TqStatus {
    guard(out, || Ok(to_c(commands::pseudo_state_cmd(scenario(sc)?, required(state, "state")?)?)))
}

/// Measure of the daseinised `subobject` in `state`, per context.
///
/// # Safety
/// String arguments are NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn tq_measure(
    sc: *const TqScenario,
    state: *const c_char,
    subobject: *const c_char,
    out: *mut *mut c_char,
) -> TqStatus {
    guard(out, || {
        let sc = scenario(sc)?;
        Ok(to_c(commands::measure_cmd(sc, required(state, "state")?, required(subobject, "subobject")?)?))
    })
}

/// Probabilistic truth value rooted at `root`, written "CONTEXT,r".
///
/// # Safety
/// String arguments are NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn tq_prob_truth(
    sc: *const TqScenario,
    prop: *const c_char,
    state: *const c_char,
    root: *const c_char,
    out: *mut *mut c_char,
) -> TqStatus {
    guard(out, || {
        let sc = scenario(sc)?;
        let json =
            commands::prob_truth(sc, required(prop, "prop")?, required(state, "state")?, required(root, "root")?)?;
        Ok(to_c(json))
    })
}

/// Global sections of the spectral presheaf; `limit` 0 means all of them.
///
/// # Safety
/// `sc` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn tq_global_sections(sc: *const TqScenario, limit: usize, out: *mut *mut c_char) -> TqStatus {
    guard(out, || Ok(to_c(commands::global_sections(scenario(sc)?, (limit > 0).then_some(limit)))))
}

/// Unitary covariance of a truth value. `at` may be null.
///
/// # Safety
/// String arguments are NUL-terminated or, where optional, null.
#[no_mangle]
pub unsafe extern "C" fn tq_covariance(
    sc: *const TqScenario,
    prop: *const c_char,
    state: *const c_char,
    unitary: *const c_char,
    at: *const c_char,
    out: *mut *mut c_char,
) -> TqStatus {
    guard(out, || {
        let sc = scenario(sc)?;
        let json = commands::covariance(
            sc,
            required(prop, "prop")?,
            required(state, "state")?,
            required(unitary, "unitary")?,
            optional(at, "at")?,
        )?;
        Ok(to_c(json))
    })
}

/// Value interval of an operator at a spectral point "CONTEXT:ATOM".
///
/// # Safety
/// String arguments are NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn tq_value_interval(
    sc: *const TqScenario,
    op: *const c_char,
    point: *const c_char,
    out: *mut *mut c_char,
) -> TqStatus {
    guard(out, || {
        let sc = scenario(sc)?;
        Ok(to_c(commands::value_interval(sc, required(op, "op")?, required(point, "point")?)?))
    })
}

/// Everything the scenario supports in one document.
///
/// # Safety
/// `sc` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn tq_report(sc: *const TqScenario, out: *mut *mut c_char) -> TqStatus {
    guard(out, || Ok(to_c(commands::report(scenario(sc)?)?)))
}

/// Kochen-Specker colourability of a basis system. `source` is either
/// `"kernaghan"` or the text of a basis file (one basis per line).
///
/// # Safety
/// `source` is NUL-terminated; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn tq_ks_check(source: *const c_char, with_poset: bool, out: *mut *mut c_char) -> TqStatus {
    guard(out, || {
        let source = required(source, "source")?;
        let sys = if source.trim() == "kernaghan" {
            toposqt::kochen::kernaghan_system()
        } else {
            toposqt::kochen::parse_system(source)?
        };
        Ok(to_c(commands::ks_check_system(&sys, with_poset)?))
    })
}

/// JSON description of the last failure on this thread, or null after a
/// successful call. Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn tq_last_error() -> *const c_char {
    LAST_ERROR.with(|cell| cell.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Release a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` is null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tq_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version, a static string.
#[no_mangle]
pub extern "C" fn tq_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
