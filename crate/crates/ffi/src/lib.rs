//! C ABI over the `spacelab` library.
//!
//! Every fallible function returns a [`SpacelabStatus`]; on failure the
//! message is available from [`spacelab_last_error_message`] on the same
//! thread. Strings handed out by the library must be released with
//! [`spacelab_string_free`], views with [`spacelab_view_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use spacelab::detect::find_delta_chain;
use spacelab::harness::run_experiment;
use spacelab::language::{count_words, max_ones, CountMode};
use spacelab::{build_pset, Error, PSetSpec, PSetView};

/// Status codes; 2 and 3 match the CLI exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpacelabStatus {
    Ok = 0,
    Internal = 1,
    Validation = 2,
    BudgetExhausted = 3,
    NullPointer = 4,
}

/// Opaque handle to a materialized view of `P`.
pub struct SpacelabView {
    view: PSetView,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> SpacelabStatus {
    match e {
        Error::Validation { .. }
        | Error::OutOfRange { .. }
        | Error::UnknownExperiment(_)
        | Error::Json(_) => SpacelabStatus::Validation,
        Error::BudgetExhausted { .. } => SpacelabStatus::BudgetExhausted,
        _ => SpacelabStatus::Internal,
    }
}

enum Fail {
    Lib(Error),
    Null(&'static str),
    Utf8(&'static str),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

/// Runs `f`, converting errors and panics into a status plus a stored message.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> SpacelabStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            SpacelabStatus::Ok
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(format!("{}: {e}", e.kind()));
            status_of(&e)
        }
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            SpacelabStatus::NullPointer
        }
        Ok(Err(Fail::Utf8(what))) => {
            set_error(format!("validation: {what} is not valid UTF-8"));
            SpacelabStatus::Validation
        }
        Err(_) => {
            set_error("internal: panic inside spacelab".into());
            SpacelabStatus::Internal
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail::Utf8(what))
}

unsafe fn view_arg<'a>(p: *const SpacelabView) -> Result<&'a PSetView, Fail> {
    p.as_ref().map(|v| &v.view).ok_or(Fail::Null("view"))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or(Fail::Null(what))
}

fn into_c(s: String) -> *mut c_char {
    CString::new(s).expect("no interior nul").into_raw()
}

/// Parses `spec_json` and materializes it on `[1..horizon]`.
///
/// # Safety
/// `spec_json` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn spacelab_view_new(
    spec_json: *const c_char,
    horizon: usize,
    out: *mut *mut SpacelabView,
) -> SpacelabStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let spec = PSetSpec::from_json(str_arg(spec_json, "spec_json")?)?;
        let view = build_pset(&spec, horizon)?;
        *out = Box::into_raw(Box::new(SpacelabView { view }));
        Ok(())
    })
}

/// # Safety
/// `view` must come from [`spacelab_view_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn spacelab_view_free(view: *mut SpacelabView) {
    if !view.is_null() {
        drop(Box::from_raw(view));
    }
}

/// # Safety
/// `view` must be a live handle or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn spacelab_view_horizon(view: *const SpacelabView) -> usize {
    view.as_ref().map_or(0, |v| v.view.horizon())
}

/// # Safety
/// `view` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn spacelab_member(
    view: *const SpacelabView,
    n: usize,
    out: *mut bool,
) -> SpacelabStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = view_arg(view)?.member(n)?;
        Ok(())
    })
}

/// Writes `c(n)` as a decimal string to `*out`.
///
/// # Safety
/// `view` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn spacelab_count_words(
    view: *const SpacelabView,
    n: usize,
    budget: u64,
    out: *mut *mut c_char,
) -> SpacelabStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let c = count_words(view_arg(view)?, n, CountMode::Optimized, budget)?;
        *out = into_c(c.to_string());
        Ok(())
    })
}

/// Writes `ω(n)` and its least witness word (`0`/`1` characters).
///
/// # Safety
/// `view` must be a live handle; `omega` and `witness` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn spacelab_max_ones(
    view: *const SpacelabView,
    n: usize,
    budget: u64,
    omega: *mut usize,
    witness: *mut *mut c_char,
) -> SpacelabStatus {
    guard(|| {
        let omega = out_arg(omega, "omega")?;
        let witness = out_arg(witness, "witness")?;
        *witness = ptr::null_mut();
        let (w, config) = max_ones(view_arg(view)?, n, budget)?;
        *omega = w;
        *witness = into_c(config.to_string());
        Ok(())
    })
}

/// Writes the witness JSON, or `null` when no chain exists below `bound`.
///
/// # Safety
/// `view` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn spacelab_find_delta_chain(
    view: *const SpacelabView,
    depth: usize,
    bound: usize,
    budget: u64,
    out: *mut *mut c_char,
) -> SpacelabStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let report = find_delta_chain(view_arg(view)?, depth, bound, budget)?;
        *out = into_c(
            report
                .witness
                .map_or_else(|| "null".to_string(), |w| w.to_json()),
        );
        Ok(())
    })
}

/// Runs a named experiment; `params_json` may be null for the defaults.
/// A budget exhaustion inside the experiment is reported through the
/// verdict, not the status.
///
/// # Safety
/// `id` must be a nul-terminated string, `params_json` null or one, and
/// `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn spacelab_run_experiment(
    id: *const c_char,
    params_json: *const c_char,
    budget: u64,
    out: *mut *mut c_char,
) -> SpacelabStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let id = str_arg(id, "id")?;
        let params = if params_json.is_null() {
            serde_json::Value::Null
        } else {
            serde_json::from_str(str_arg(params_json, "params_json")?).map_err(Error::from)?
        };
        let report = run_experiment(id, &params, budget)?;
        *out = into_c(report.to_json());
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn spacelab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn spacelab_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn spacelab_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
