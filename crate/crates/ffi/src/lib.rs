//! C ABI over congruence-core. Every call returns a `CongruenceStatus`;
//! on failure `congruence_last_error` describes what went wrong. Strings
//! handed out by the library are released with `congruence_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use congruence_core::padic::{gamma_exponent, PadicContext};
use congruence_core::series::parse_number;
use congruence_core::spec::{load_spec, print_spec, Spec};
use congruence_core::Error;

/// Status codes. Nonzero values above 3 are ABI misuse.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CongruenceStatus {
    Ok = 0,
    /// A check ran and failed.
    Fail = 1,
    /// Budget or precision ran out.
    Inconclusive = 2,
    /// Bad arguments, bad spec, or an unsupported request.
    Usage = 3,
    NullPointer = 4,
    InvalidUtf8 = 5,
    Panic = 6,
}

/// A loaded spec.
pub struct CongruenceSpec {
    spec: Spec,
}

/// A p-adic field.
pub struct CongruenceContext {
    ctx: Arc<PadicContext>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let c = CString::new(msg.into().replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> CongruenceStatus {
    match congruence_core::cli::error_code(e) {
        2 => CongruenceStatus::Inconclusive,
        _ => CongruenceStatus::Usage,
    }
}

fn fail(e: Error) -> CongruenceStatus {
    let s = status_of(&e);
    set_error(e.to_string());
    s
}

fn guard(f: impl FnOnce() -> CongruenceStatus) -> CongruenceStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("internal panic");
            CongruenceStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, CongruenceStatus> {
    if s.is_null() {
        set_error("null string argument");
        return Err(CongruenceStatus::NullPointer);
    }
    CStr::from_ptr(s).to_str().map_err(|_| {
        set_error("string argument is not UTF-8");
        CongruenceStatus::InvalidUtf8
    })
}

fn give_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("nul bytes removed").into_raw()
}

/// The message of the last failed call on this thread, or NULL. The
/// pointer stays valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn congruence_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn congruence_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses and validates spec text. `precision` 0 keeps the file's values.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn congruence_spec_load(
    text: *const c_char,
    precision: u32,
    out: *mut *mut CongruenceSpec,
) -> CongruenceStatus {
    guard(|| {
        if out.is_null() {
            set_error("null output pointer");
            return CongruenceStatus::NullPointer;
        }
        let text = match read_str(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match load_spec(text, (precision > 0).then_some(precision)) {
            Ok(spec) => {
                *out = Box::into_raw(Box::new(CongruenceSpec { spec }));
                CongruenceStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Prints a loaded spec back to TOML.
///
/// # Safety
/// `spec` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn congruence_spec_print(spec: *const CongruenceSpec, out: *mut *mut c_char) -> CongruenceStatus {
    guard(|| {
        if spec.is_null() || out.is_null() {
            set_error("null pointer");
            return CongruenceStatus::NullPointer;
        }
        match print_spec(&(*spec).spec.file) {
            Ok(s) => {
                *out = give_string(s);
                CongruenceStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `spec` must be NULL or a handle from `congruence_spec_load`.
#[no_mangle]
pub unsafe extern "C" fn congruence_spec_free(spec: *mut CongruenceSpec) {
    if !spec.is_null() {
        drop(Box::from_raw(spec));
    }
}

/// Q_p with `precision` digits.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn congruence_context_new(
    p: u64,
    precision: u32,
    out: *mut *mut CongruenceContext,
) -> CongruenceStatus {
    guard(|| {
        if out.is_null() {
            set_error("null output pointer");
            return CongruenceStatus::NullPointer;
        }
        match PadicContext::qp(p, precision) {
            Ok(ctx) => {
                *out = Box::into_raw(Box::new(CongruenceContext { ctx }));
                CongruenceStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `ctx` must be NULL or a handle from `congruence_context_new`.
#[no_mangle]
pub unsafe extern "C" fn congruence_context_free(ctx: *mut CongruenceContext) {
    if !ctx.is_null() {
        drop(Box::from_raw(ctx));
    }
}

/// The valuation of a number literal. Zero at working precision is an
/// Inconclusive status.
///
/// # Safety
/// `ctx` must be a live handle, `literal` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn congruence_valuation(
    ctx: *const CongruenceContext,
    literal: *const c_char,
    out: *mut i64,
) -> CongruenceStatus {
    guard(|| {
        if ctx.is_null() || out.is_null() {
            set_error("null pointer");
            return CongruenceStatus::NullPointer;
        }
        let lit = match read_str(literal) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let x = match parse_number(&(*ctx).ctx, lit) {
            Ok(x) => x,
            Err(e) => return fail(e),
        };
        match x.valuation() {
            Ok(v) => {
                *out = v;
                CongruenceStatus::Ok
            }
            Err(bound) => {
                set_error(format!("zero at working precision: valuation at least {bound}"));
                CongruenceStatus::Inconclusive
            }
        }
    })
}

/// γ(e, n) = e(n − 1) + 1.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn congruence_gamma(e: u32, n: u32, out: *mut u32) -> CongruenceStatus {
    guard(|| {
        if out.is_null() {
            set_error("null output pointer");
            return CongruenceStatus::NullPointer;
        }
        match gamma_exponent(e, n) {
            Ok(g) => {
                *out = g;
                CongruenceStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Runs a command line as the `congruence` binary would (without the
/// program name) and returns its exit code. The JSON report goes to
/// `out_json`; errors, as JSON, to `out_err`. Either output may be NULL.
///
/// # Safety
/// `argv` must hold `argc` NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn congruence_run(
    argc: usize,
    argv: *const *const c_char,
    out_json: *mut *mut c_char,
    out_err: *mut *mut c_char,
) -> i32 {
    let mut code = 3;
    let status = guard(|| {
        if argc > 0 && argv.is_null() {
            set_error("null argv");
            return CongruenceStatus::NullPointer;
        }
        let mut args = vec!["congruence".to_string()];
        for i in 0..argc {
            match read_str(*argv.add(i)) {
                Ok(s) => args.push(s.to_string()),
                Err(s) => return s,
            }
        }
        let o = congruence_core::cli::run_args(args);
        code = o.code;
        if !out_json.is_null() {
            *out_json = give_string(o.stdout);
        }
        if !out_err.is_null() {
            *out_err = give_string(o.stderr.clone());
        }
        if !o.stderr.is_empty() {
            set_error(o.stderr);
        }
        CongruenceStatus::Ok
    });
    if status == CongruenceStatus::Ok {
        code
    } else {
        status as i32
    }
}
