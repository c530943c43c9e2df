//! C interface.
//!
//! Instances are opaque handles created by `x3sat_instance_parse` and
//! released with `x3sat_instance_free`. Every fallible call returns an
//! `X3satStatus`; on failure `x3sat_last_error` describes the problem for
//! the calling thread. Strings handed out by the library are released with
//! `x3sat_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use x3sat_count::count::{
    count_by_weight_with, count_max_weight_with, count_with, default_qbound, SolverConfig,
};
use x3sat_count::toolkit::{
    branching_factor, parse_instance_with, BranchingVector, InstanceDocument, ParseOptions,
};
use x3sat_count::Error;

/// Result codes of every fallible call.
#[repr(C)]
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum X3satStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Input = 4,
    Contract = 5,
    Internal = 6,
}

/// A parsed instance.
pub struct X3satInstance {
    doc: InstanceDocument,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> X3satStatus {
    match e {
        Error::Parse { .. } => X3satStatus::Parse,
        Error::Input(_) | Error::OracleCap { .. } => X3satStatus::Input,
        Error::Contract(_) | Error::UnknownVariable(_) | Error::UnknownClause(_) => {
            X3satStatus::Contract
        }
    }
}

fn guard(f: impl FnOnce() -> Result<(), X3satStatus>) -> X3satStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => X3satStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            X3satStatus::Internal
        }
    }
}

fn fail(e: Error) -> X3satStatus {
    let s = status_of(&e);
    set_error(e.to_string());
    s
}

fn null(what: &str) -> X3satStatus {
    set_error(format!("{what} is null"));
    X3satStatus::NullPointer
}

unsafe fn instance<'a>(p: *const X3satInstance) -> Result<&'a X3satInstance, X3satStatus> {
    p.as_ref().ok_or_else(|| null("instance"))
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), X3satStatus> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = CString::new(s).expect("no interior NUL").into_raw();
    Ok(())
}

fn config(seed: u64) -> SolverConfig {
    SolverConfig {
        seed,
        ..SolverConfig::default()
    }
}

/// Parses `text` (NUL-terminated UTF-8) into a new instance stored in `*out`.
///
/// # Safety
/// `text` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn x3sat_instance_parse(
    text: *const c_char,
    dimacs_cnf: bool,
    out: *mut *mut X3satInstance,
) -> X3satStatus {
    guard(|| {
        if text.is_null() {
            return Err(null("text"));
        }
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let text = CStr::from_ptr(text).to_str().map_err(|_| {
            set_error("text is not UTF-8".into());
            X3satStatus::InvalidUtf8
        })?;
        let doc = parse_instance_with(text, ParseOptions { dimacs_cnf }).map_err(fail)?;
        *out = Box::into_raw(Box::new(X3satInstance { doc }));
        Ok(())
    })
}

/// Releases an instance; null is ignored.
///
/// # Safety
/// `inst` must come from `x3sat_instance_parse` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn x3sat_instance_free(inst: *mut X3satInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// Declared variable count, or 0 for a null handle.
///
/// # Safety
/// `inst` must be null or a live instance.
#[no_mangle]
pub unsafe extern "C" fn x3sat_instance_num_vars(inst: *const X3satInstance) -> usize {
    inst.as_ref().map_or(0, |i| i.doc.n)
}

/// Clause count, or 0 for a null handle.
///
/// # Safety
/// `inst` must be null or a live instance.
#[no_mangle]
pub unsafe extern "C" fn x3sat_instance_num_clauses(inst: *const X3satInstance) -> usize {
    inst.as_ref().map_or(0, |i| i.doc.m())
}

/// Number of solutions as a decimal string in `*out`.
///
/// # Safety
/// `inst` must be a live instance and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn x3sat_count(
    inst: *const X3satInstance,
    seed: u64,
    out: *mut *mut c_char,
) -> X3satStatus {
    guard(|| {
        let doc = &instance(inst)?.doc;
        let (count, _) = count_with(&doc.formula(), &doc.ones(), &config(seed)).map_err(fail)?;
        write_string(out, count.to_string())
    })
}

/// Solutions per total weight as JSON `{"weight_shift":S,"coefficients":["a0","a1",...]}`
/// in `*out`. Coefficient `k` belongs to weight `k - S`. A `qbound` of 0
/// selects the default `n^2`.
///
/// # Safety
/// `inst` must be a live instance and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn x3sat_count_weighted(
    inst: *const X3satInstance,
    qbound: u64,
    seed: u64,
    out: *mut *mut c_char,
) -> X3satStatus {
    guard(|| {
        let doc = &instance(inst)?.doc;
        let q = if qbound == 0 {
            default_qbound(doc.n)
        } else {
            qbound
        };
        let (poly, _) =
            count_by_weight_with(&doc.formula(), &doc.weight_assignment(), q, &config(seed))
                .map_err(fail)?;
        let coeffs: Vec<String> = poly.coeffs().iter().map(|a| a.to_string()).collect();
        let value = serde_json::json!({ "weight_shift": doc.weight_shift, "coefficients": coeffs });
        write_string(out, value.to_string())
    })
}

/// Number of maximum-weight solutions (decimal string in `*count`) and
/// their weight (`*weight`). An unsatisfiable instance gives "0" and 0.
///
/// # Safety
/// `inst` must be a live instance; `count` and `weight` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn x3sat_count_max_weight(
    inst: *const X3satInstance,
    seed: u64,
    count: *mut *mut c_char,
    weight: *mut i64,
) -> X3satStatus {
    guard(|| {
        let doc = &instance(inst)?.doc;
        if weight.is_null() {
            return Err(null("weight pointer"));
        }
        let (pair, _) =
            count_max_weight_with(&doc.formula(), &doc.weight_assignment(), &config(seed))
                .map_err(fail)?;
        let w = if pair.c == 0u32.into() {
            0
        } else {
            pair.d as i64 - doc.weight_shift as i64
        };
        write_string(count, pair.c.to_string())?;
        *weight = w;
        Ok(())
    })
}

/// Branching factor of the `len` entries at `t`.
///
/// # Safety
/// `t` must point to `len` readable values and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn x3sat_tau(t: *const u32, len: usize, out: *mut f64) -> X3satStatus {
    guard(|| {
        if t.is_null() {
            return Err(null("vector"));
        }
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let v = BranchingVector::new(std::slice::from_raw_parts(t, len).to_vec()).map_err(fail)?;
        *out = branching_factor(&v);
        Ok(())
    })
}

/// Releases a string returned by this library; null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn x3sat_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn x3sat_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}
