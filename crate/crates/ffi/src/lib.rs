// SPDX-License-Identifier: Apache-2.0

//! C ABI over `rfs-core`.
//!
//! Objects are opaque heap handles released with their `_free` function.
//! Every fallible call returns an [`RfsStatus`] and writes results through
//! out-pointers; on failure the message is available from
//! [`rfs_last_error_message`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use rfs_core::boolfn::BooleanFunction;
use rfs_core::instance::{OracleHandle, RfsInstance as CoreInstance};
use rfs_core::nonparity::mu_joint;
use rfs_core::quantum::{build_circuit, run, Mode, DEFAULT_QUBIT_CAP};
use rfs_core::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RfsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Domain = 4,
    TooLarge = 5,
    Unsolved = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RfsMode {
    FourQuery = 0,
    Kickback = 1,
}

/// Outcome of an exact quantum simulation.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct RfsSimReport {
    pub answer: bool,
    pub prob_correct: f64,
    pub prob_incorrect: f64,
    pub oracle_queries: u64,
    pub ancilla_residual: f64,
    pub qubits_used: usize,
}

/// Opaque inner function.
pub struct RfsFunction {
    inner: BooleanFunction,
}

/// Opaque problem instance.
pub struct RfsInstance {
    inner: CoreInstance,
}

/// Opaque query-counting oracle over its own copy of an instance.
pub struct RfsOracle {
    instance: CoreInstance,
    queries: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let text = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(text));
}

fn status_of(e: &Error) -> RfsStatus {
    match e {
        Error::Parse { .. } | Error::UnknownFunction(_) | Error::Json(_) => RfsStatus::Parse,
        Error::TooLarge { .. } => RfsStatus::TooLarge,
        Error::Unsolved { .. } => RfsStatus::Unsolved,
        _ => RfsStatus::Domain,
    }
}

/// Run `body`, turning errors and panics into status codes.
fn guard(body: impl FnOnce() -> Result<(), (RfsStatus, String)>) -> RfsStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => RfsStatus::Ok,
        Ok(Err((status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("panic inside rfs".into());
            RfsStatus::Panic
        }
    }
}

fn core<T>(r: rfs_core::Result<T>) -> Result<T, (RfsStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (RfsStatus, String) {
    (RfsStatus::NullPointer, format!("{what} is null"))
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, (RfsStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, (RfsStatus, String)> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, (RfsStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (RfsStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn rfs_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn rfs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Release a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn rfs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parse a function spec such as `or:2` or `table-hex:2:E`.
///
/// # Safety
/// `spec` must be a NUL-terminated string; `out_fn` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rfs_function_parse(
    spec: *const c_char,
    out_fn: *mut *mut RfsFunction,
) -> RfsStatus {
    guard(|| {
        let slot = out(out_fn, "out_fn")?;
        let inner: BooleanFunction = core(text(spec, "spec")?.parse())?;
        *slot = Box::into_raw(Box::new(RfsFunction { inner }));
        Ok(())
    })
}

/// # Safety
/// `f` must come from [`rfs_function_parse`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn rfs_function_free(f: *mut RfsFunction) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn rfs_function_arity(f: *const RfsFunction, out_n: *mut usize) -> RfsStatus {
    guard(|| {
        *out(out_n, "out_n")? = borrow(f, "f")?.inner.arity();
        Ok(())
    })
}

/// `g(s)`, with bit 1 of `s` as its most significant bit.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn rfs_function_evaluate(
    f: *const RfsFunction,
    s: u32,
    out_bit: *mut bool,
) -> RfsStatus {
    guard(|| {
        let slot = out(out_bit, "out_bit")?;
        *slot = core(borrow(f, "f")?.inner.evaluate(s))?;
        Ok(())
    })
}

/// Whether `g(s) = (s . z) xor c` on its domain; `z` and `c` are written
/// only when it is.
///
/// # Safety
/// Pointers must be valid; `out_z` and `out_c` may be null.
#[no_mangle]
pub unsafe extern "C" fn rfs_function_is_parity(
    f: *const RfsFunction,
    out_is: *mut bool,
    out_z: *mut u32,
    out_c: *mut bool,
) -> RfsStatus {
    guard(|| {
        let is = out(out_is, "out_is")?;
        let form = borrow(f, "f")?.inner.is_parity();
        *is = form.is_some();
        if let Some(form) = form {
            if let Some(z) = out_z.as_mut() {
                *z = form.z;
            }
            if let Some(c) = out_c.as_mut() {
                *c = form.c;
            }
        }
        Ok(())
    })
}

/// Value and certified gap of the joint nonparity game.
///
/// # Safety
/// Pointers must be valid; `out_gap` may be null.
#[no_mangle]
pub unsafe extern "C" fn rfs_mu_joint(
    f: *const RfsFunction,
    tol: f64,
    out_value: *mut f64,
    out_gap: *mut f64,
) -> RfsStatus {
    guard(|| {
        let value = out(out_value, "out_value")?;
        let (v, sol) = core(mu_joint(&borrow(f, "f")?.inner, tol))?;
        *value = v;
        if let Some(gap) = out_gap.as_mut() {
            *gap = sol.gap;
        }
        Ok(())
    })
}

/// Generate an explicit instance. `answer` is 0 or 1 to force the root
/// answer, or -1 to let the seed decide.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn rfs_instance_generate(
    f: *const RfsFunction,
    height: usize,
    seed: u64,
    answer: i32,
    out_inst: *mut *mut RfsInstance,
) -> RfsStatus {
    guard(|| {
        let slot = out(out_inst, "out_inst")?;
        let g = &borrow(f, "f")?.inner;
        let answer = match answer {
            -1 => None,
            0 => Some(false),
            1 => Some(true),
            other => {
                return Err((
                    RfsStatus::InvalidArgument,
                    format!("answer must be -1, 0 or 1, got {other}"),
                ))
            }
        };
        let inner = core(CoreInstance::generate(g.arity(), height, g, seed, answer))?;
        *slot = Box::into_raw(Box::new(RfsInstance { inner }));
        Ok(())
    })
}

/// # Safety
/// `json` must be a NUL-terminated string; `out_inst` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rfs_instance_from_json(
    json: *const c_char,
    out_inst: *mut *mut RfsInstance,
) -> RfsStatus {
    guard(|| {
        let slot = out(out_inst, "out_inst")?;
        let inner = core(CoreInstance::from_json(text(json, "json")?))?;
        *slot = Box::into_raw(Box::new(RfsInstance { inner }));
        Ok(())
    })
}

/// Serialize to JSON; release the string with [`rfs_string_free`].
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn rfs_instance_to_json(
    inst: *const RfsInstance,
    out_json: *mut *mut c_char,
) -> RfsStatus {
    guard(|| {
        let slot = out(out_json, "out_json")?;
        let doc = core(borrow(inst, "inst")?.inner.to_json())?;
        *slot = CString::new(doc)
            .map_err(|e| (RfsStatus::Domain, e.to_string()))?
            .into_raw();
        Ok(())
    })
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn rfs_instance_answer(
    inst: *const RfsInstance,
    out_bit: *mut bool,
) -> RfsStatus {
    guard(|| {
        let slot = out(out_bit, "out_bit")?;
        *slot = core(borrow(inst, "inst")?.inner.answer())?;
        Ok(())
    })
}

/// # Safety
/// `inst` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn rfs_instance_free(inst: *mut RfsInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// Counting oracle over a copy of `inst`; `inst` may be freed afterwards.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn rfs_oracle_new(
    inst: *const RfsInstance,
    out_oracle: *mut *mut RfsOracle,
) -> RfsStatus {
    guard(|| {
        let slot = out(out_oracle, "out_oracle")?;
        let instance = borrow(inst, "inst")?.inner.clone();
        *slot = Box::into_raw(Box::new(RfsOracle {
            instance,
            queries: 0,
        }));
        Ok(())
    })
}

/// Leaf value `A(x_1, ..., x_h)`; `xs` holds `height` edge labels.
///
/// # Safety
/// `xs` must point to `len` readable values; other pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn rfs_oracle_query(
    oracle: *mut RfsOracle,
    xs: *const u32,
    len: usize,
    out_bit: *mut bool,
) -> RfsStatus {
    guard(|| {
        let slot = out(out_bit, "out_bit")?;
        let oracle = out(oracle, "oracle")?;
        if xs.is_null() && len > 0 {
            return Err(null("xs"));
        }
        let path = if len == 0 {
            &[][..]
        } else {
            std::slice::from_raw_parts(xs, len)
        };
        let mut handle = OracleHandle::resume(&oracle.instance, oracle.queries);
        let bit = core(handle.query(path))?;
        oracle.queries = handle.queries();
        *slot = bit;
        Ok(())
    })
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn rfs_oracle_query_count(
    oracle: *const RfsOracle,
    out_count: *mut u64,
) -> RfsStatus {
    guard(|| {
        *out(out_count, "out_count")? = borrow(oracle, "oracle")?.queries;
        Ok(())
    })
}

/// # Safety
/// `oracle` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn rfs_oracle_free(oracle: *mut RfsOracle) {
    if !oracle.is_null() {
        drop(Box::from_raw(oracle));
    }
}

/// Build and run the recursive circuit for `inst` exactly. `mode` is an
/// [`RfsMode`] value, taken as an integer so out-of-range input is an
/// error rather than undefined behavior.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn rfs_simulate(
    inst: *const RfsInstance,
    mode: u32,
    out_report: *mut RfsSimReport,
) -> RfsStatus {
    guard(|| {
        let slot = out(out_report, "out_report")?;
        let inst = &borrow(inst, "inst")?.inner;
        let mode = match mode {
            m if m == RfsMode::FourQuery as u32 => Mode::FourQuery,
            m if m == RfsMode::Kickback as u32 => Mode::Kickback,
            other => return Err((RfsStatus::InvalidArgument, format!("unknown mode {other}"))),
        };
        let circuit = core(build_circuit(
            inst.n(),
            inst.height(),
            inst.function(),
            mode,
            DEFAULT_QUBIT_CAP,
        ))?;
        let r = core(run(&circuit, inst))?;
        *slot = RfsSimReport {
            answer: r.answer,
            prob_correct: r.prob_correct,
            prob_incorrect: r.prob_incorrect,
            oracle_queries: r.oracle_queries,
            ancilla_residual: r.ancilla_residual,
            qubits_used: r.qubits_used,
        };
        Ok(())
    })
}
