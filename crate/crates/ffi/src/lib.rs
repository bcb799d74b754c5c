//! C ABI over `stratlab`.
//!
//! Problems are opaque heap handles created from a world JSON document and
//! released with `strat_problem_free`. Every fallible call returns a
//! `StratStatus`; on failure `strat_last_error` describes the most recent
//! error on the calling thread. Strings returned by the library must be
//! released with `strat_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use stratlab::error::Error;
use stratlab::response::{best_response_det, best_response_mix, ResponseMap};
use stratlab::risk::{hypothesis_risk, strategic_risk};
use stratlab::scenario::{gen_annulus, AnnulusConfig};
use stratlab::theory::theorem1_check;
use stratlab::world::{parse_world, serialize_world, Mixture, Problem};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StratStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    InvalidWorld = 4,
    DimensionMismatch = 5,
    IndexError = 6,
    EmptyDataset = 7,
    GridTooLarge = 8,
    InvalidDelta = 9,
    InvalidMixture = 10,
    ConfigError = 11,
    InvalidArgument = 12,
    NoCoords = 13,
    IoError = 14,
    BufferTooSmall = 15,
    Panic = 99,
}

impl From<&Error> for StratStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Parse { .. } => StratStatus::ParseError,
            Error::InvalidWorld(_) => StratStatus::InvalidWorld,
            Error::DimensionMismatch { .. } => StratStatus::DimensionMismatch,
            Error::Index { .. } => StratStatus::IndexError,
            Error::EmptyDataset => StratStatus::EmptyDataset,
            Error::GridTooLarge { .. } => StratStatus::GridTooLarge,
            Error::InvalidDelta(_) => StratStatus::InvalidDelta,
            Error::InvalidMixture(_) => StratStatus::InvalidMixture,
            Error::Config(_) => StratStatus::ConfigError,
            Error::InvalidArgument(_) => StratStatus::InvalidArgument,
            Error::NoCoords => StratStatus::NoCoords,
            Error::Io(_) => StratStatus::IoError,
        }
    }
}

/// Opaque handle to a world and its hypothesis class.
pub struct StratProblem {
    inner: Problem,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let text = CString::new(message.into().replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(text));
}

struct Failure(StratStatus);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        set_error(format!("{}: {e}", e.code()));
        Failure(StratStatus::from(&e))
    }
}

fn fail(status: StratStatus, message: &str) -> Failure {
    set_error(message);
    Failure(status)
}

/// Runs `body`, converting errors and panics into status codes.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> StratStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => StratStatus::Ok,
        Ok(Err(Failure(status))) => status,
        Err(_) => {
            set_error("internal panic");
            StratStatus::Panic
        }
    }
}

unsafe fn problem<'a>(handle: *const StratProblem) -> Result<&'a Problem, Failure> {
    handle
        .as_ref()
        .map(|h| &h.inner)
        .ok_or_else(|| fail(StratStatus::NullPointer, "problem handle is null"))
}

unsafe fn out_ref<'a, T>(out: *mut T) -> Result<&'a mut T, Failure> {
    out.as_mut().ok_or_else(|| fail(StratStatus::NullPointer, "output pointer is null"))
}

unsafe fn weights<'a>(ptr: *const f64, len: usize) -> Result<&'a [f64], Failure> {
    if ptr.is_null() {
        return Err(fail(StratStatus::NullPointer, "weights pointer is null"));
    }
    Ok(std::slice::from_raw_parts(ptr, len))
}

fn into_c_string(text: String) -> Result<*mut c_char, Failure> {
    CString::new(text)
        .map(CString::into_raw)
        .map_err(|_| fail(StratStatus::InvalidArgument, "string contains a NUL byte"))
}

fn write_targets(delta: &ResponseMap, out: *mut usize, capacity: usize) -> Result<(), Failure> {
    if out.is_null() {
        return Err(fail(StratStatus::NullPointer, "target buffer is null"));
    }
    if capacity < delta.len() {
        return Err(fail(
            StratStatus::BufferTooSmall,
            &format!("target buffer holds {capacity} entries, {} needed", delta.len()),
        ));
    }
    // SAFETY: the caller guarantees `out` points to `capacity` writable entries.
    let dst = unsafe { std::slice::from_raw_parts_mut(out, delta.len()) };
    dst.copy_from_slice(delta.targets());
    Ok(())
}

/// Message for the last failed call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn strat_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn strat_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses and validates a world JSON document.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn strat_problem_from_json(json: *const c_char, out: *mut *mut StratProblem) -> StratStatus {
    guard(|| {
        let out = out_ref(out)?;
        *out = ptr::null_mut();
        if json.is_null() {
            return Err(fail(StratStatus::NullPointer, "json is null"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|_| fail(StratStatus::InvalidUtf8, "json is not valid UTF-8"))?;
        let inner = parse_world(text)?;
        *out = Box::into_raw(Box::new(StratProblem { inner }));
        Ok(())
    })
}

/// Builds the default annulus scenario.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn strat_problem_annulus_default(out: *mut *mut StratProblem) -> StratStatus {
    guard(|| {
        let out = out_ref(out)?;
        let inner = gen_annulus(&AnnulusConfig::default())?;
        *out = Box::into_raw(Box::new(StratProblem { inner }));
        Ok(())
    })
}

/// Releases a handle. NULL is ignored.
///
/// # Safety
/// `handle` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn strat_problem_free(handle: *mut StratProblem) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Number of points in the world.
///
/// # Safety
/// `handle` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn strat_problem_point_count(handle: *const StratProblem, out: *mut usize) -> StratStatus {
    guard(|| {
        *out_ref(out)? = problem(handle)?.world.len();
        Ok(())
    })
}

/// Number of hypotheses in the class.
///
/// # Safety
/// `handle` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn strat_problem_hypothesis_count(handle: *const StratProblem, out: *mut usize) -> StratStatus {
    guard(|| {
        *out_ref(out)? = problem(handle)?.class.len();
        Ok(())
    })
}

/// Best response to hypothesis `k`: writes one target index per point.
///
/// # Safety
/// `targets` must hold `capacity` writable entries.
#[no_mangle]
pub unsafe extern "C" fn strat_best_response_hypothesis(
    handle: *const StratProblem,
    k: usize,
    targets: *mut usize,
    capacity: usize,
) -> StratStatus {
    guard(|| {
        let p = problem(handle)?;
        if k >= p.class.len() {
            return Err(Error::Index { index: k, len: p.class.len() }.into());
        }
        write_targets(&best_response_det(&p.world, p.class.get(k))?, targets, capacity)
    })
}

/// Best response to the mixture with `len` weights in class order.
///
/// # Safety
/// `w` must point to `len` readable doubles and `targets` to `capacity`
/// writable entries.
#[no_mangle]
pub unsafe extern "C" fn strat_best_response_mixture(
    handle: *const StratProblem,
    w: *const f64,
    len: usize,
    targets: *mut usize,
    capacity: usize,
) -> StratStatus {
    guard(|| {
        let p = problem(handle)?;
        let q = Mixture::new(weights(w, len)?.to_vec())?;
        write_targets(&best_response_mix(&p.world, &p.class, &q)?, targets, capacity)
    })
}

/// Strategic risk of hypothesis `k` under its own best response.
///
/// # Safety
/// `handle` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn strat_hypothesis_risk(handle: *const StratProblem, k: usize, out: *mut f64) -> StratStatus {
    guard(|| {
        let p = problem(handle)?;
        let out = out_ref(out)?;
        if k >= p.class.len() {
            return Err(Error::Index { index: k, len: p.class.len() }.into());
        }
        let f = p.class.get(k);
        *out = hypothesis_risk(&p.world, f, &best_response_det(&p.world, f)?);
        Ok(())
    })
}

/// Strategic risk of a mixture under its own best response.
///
/// # Safety
/// `w` must point to `len` readable doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn strat_mixture_risk(
    handle: *const StratProblem,
    w: *const f64,
    len: usize,
    out: *mut f64,
) -> StratStatus {
    guard(|| {
        let p = problem(handle)?;
        let out = out_ref(out)?;
        let q = Mixture::new(weights(w, len)?.to_vec())?;
        let delta = best_response_mix(&p.world, &p.class, &q)?;
        *out = strategic_risk(&p.world, &p.class, &q, &delta)?;
        Ok(())
    })
}

/// Condition report for optimal pairs, as JSON. Release the result with
/// `strat_string_free`.
///
/// # Safety
/// `handle` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn strat_check_pairs_json(
    handle: *const StratProblem,
    grid_k: u32,
    out: *mut *mut c_char,
) -> StratStatus {
    guard(|| {
        let out = out_ref(out)?;
        *out = ptr::null_mut();
        let p = problem(handle)?;
        let report = theorem1_check(&p.world, &p.class, grid_k)?;
        *out = into_c_string(serde_json::to_string(&report).expect("report serialises"))?;
        Ok(())
    })
}

/// The problem serialised as a world JSON document. Release the result
/// with `strat_string_free`.
///
/// # Safety
/// `handle` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn strat_problem_to_json(handle: *const StratProblem, out: *mut *mut c_char) -> StratStatus {
    guard(|| {
        let out = out_ref(out)?;
        *out = into_c_string(serialize_world(problem(handle)?))?;
        Ok(())
    })
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn strat_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
