//! C ABI over `teichlab`.
//!
//! Objects cross the boundary as opaque pointers created by the `tl_*_parse`
//! and `tl_arithmeticoid_*` constructors and released with the matching
//! `tl_*_free`.
//! Every fallible call returns a [`TlStatus`] and writes its result through an
//! out-pointer; the message of the most recent failure on the calling thread
//! is available from [`tl_last_error`].
//!
//! Strings returned to the caller use the snprintf convention: the function
//! writes at most `cap - 1` bytes plus a NUL and returns the full length.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use teichlab::adelic::{self, Arithmeticoid, ArithmeticoidJson};
use teichlab::heights::{self, ProjectivePoint};
use teichlab::numfield::{self, FieldElement, NumberField};
use teichlab::szpiro;
use teichlab::Error;

/// Result codes. Zero is success.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidArgument = 4,
    ZeroElement = 5,
    Mismatch = 6,
    Unsupported = 7,
    Numerical = 8,
    Internal = 9,
}

/// A base field.
pub struct TlField(NumberField);

/// An element of a base field.
pub struct TlElement(FieldElement);

/// An arithmeticoid.
pub struct TlArithmeticoid(Arithmeticoid);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> TlStatus {
    match e {
        Error::Parse(_) => TlStatus::Parse,
        Error::ZeroElement | Error::InfiniteOrder => TlStatus::ZeroElement,
        Error::PlaceMismatch(_) | Error::FieldMismatch(_) | Error::PrimeMismatch { .. } => TlStatus::Mismatch,
        Error::UnsupportedField(_) | Error::WittLength(_) => TlStatus::Unsupported,
        Error::Divergent(_) | Error::Precision(_) | Error::NonIntegral { .. } => TlStatus::Numerical,
        _ => TlStatus::InvalidArgument,
    }
}

struct Fail(TlStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> TlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            TlStatus::Ok
        }
        Ok(Err(Fail(code, msg))) => {
            set_error(msg);
            code
        }
        Err(_) => {
            set_error("panic inside teichlab".into());
            TlStatus::Internal
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| Fail(TlStatus::NullPointer, format!("{what} is null")))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(TlStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(TlStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(TlStatus::NullPointer, format!("{what} is null")));
    }
    out.write(value);
    Ok(())
}

unsafe fn put_box<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    put(out, Box::into_raw(Box::new(value)), "out")
}

unsafe fn copy_out(s: &str, buf: *mut c_char, cap: usize) -> usize {
    if !buf.is_null() && cap > 0 {
        let n = s.len().min(cap - 1);
        ptr::copy_nonoverlapping(s.as_ptr(), buf.cast::<u8>(), n);
        *buf.add(n) = 0;
    }
    s.len()
}

unsafe fn free<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn tl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Short description of a status code as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn tl_status_name(status: TlStatus) -> *const c_char {
    let s: &'static str = match status {
        TlStatus::Ok => "ok\0",
        TlStatus::NullPointer => "null pointer\0",
        TlStatus::InvalidUtf8 => "invalid UTF-8\0",
        TlStatus::Parse => "parse error\0",
        TlStatus::InvalidArgument => "invalid argument\0",
        TlStatus::ZeroElement => "zero element\0",
        TlStatus::Mismatch => "mismatch\0",
        TlStatus::Unsupported => "unsupported\0",
        TlStatus::Numerical => "numerical failure\0",
        TlStatus::Internal => "internal error\0",
    };
    s.as_ptr().cast()
}

/// Message of the last failure on this thread; empty after a success.
///
/// # Safety
/// `buf` is null or points to `cap` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn tl_last_error(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| copy_out(&e.borrow(), buf, cap))
}

/// Parse `Q`, `Q(i)`, `Q(sqrt(-d))`.
///
/// # Safety
/// `spec` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn tl_field_parse(spec: *const c_char, out: *mut *mut TlField) -> TlStatus {
    guard(|| {
        let field = NumberField::parse(text(spec, "spec")?)?;
        put_box(out, TlField(field))
    })
}

/// # Safety
/// `field` is null or came from `tl_field_parse` and is not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tl_field_free(field: *mut TlField) {
    free(field)
}

/// Parse an element such as `3/4`, `2+i`, `1-2*sqrt(-5)`.
///
/// # Safety
/// `field` is a live handle, `value` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tl_element_parse(
    field: *const TlField,
    value: *const c_char,
    out: *mut *mut TlElement,
) -> TlStatus {
    guard(|| {
        let field = borrow(field, "field")?.0;
        let x = FieldElement::parse(field, text(value, "value")?)?;
        put_box(out, TlElement(x))
    })
}

/// # Safety
/// `x` is a live handle; `buf` is null or has `cap` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn tl_element_to_string(x: *const TlElement, buf: *mut c_char, cap: usize) -> usize {
    match x.as_ref() {
        Some(x) => copy_out(&x.0.to_string(), buf, cap),
        None => copy_out("", buf, cap),
    }
}

/// # Safety
/// `x` is null or came from `tl_element_parse` and is not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tl_element_free(x: *mut TlElement) {
    free(x)
}

/// The classical product formula for `x`: the floating residual and whether
/// the exact per-prime exponents cancel.
///
/// # Safety
/// `x` is a live handle; the out-pointers are writable.
#[no_mangle]
pub unsafe extern "C" fn tl_product_formula(x: *const TlElement, residual: *mut f64, exact: *mut bool) -> TlStatus {
    guard(|| {
        let r = numfield::product_formula_check(&borrow(x, "x")?.0)?;
        put(residual, r.residual, "residual")?;
        put(exact, r.exact_cancellation, "exact")
    })
}

/// The standard arithmeticoid of a field.
///
/// # Safety
/// `field` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn tl_arithmeticoid_standard(field: *const TlField, out: *mut *mut TlArithmeticoid) -> TlStatus {
    guard(|| {
        let field = borrow(field, "field")?.0;
        put_box(out, TlArithmeticoid(Arithmeticoid::standard(field)))
    })
}

/// Read an arithmeticoid from its JSON form.
///
/// # Safety
/// `json` is NUL-terminated; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn tl_arithmeticoid_from_json(json: *const c_char, out: *mut *mut TlArithmeticoid) -> TlStatus {
    guard(|| {
        let parsed: ArithmeticoidJson = serde_json::from_str(text(json, "json")?).map_err(Error::from)?;
        put_box(out, TlArithmeticoid(Arithmeticoid::from_json(&parsed)?))
    })
}

/// JSON form of an arithmeticoid.
///
/// # Safety
/// `y` is a live handle; `buf` is null or has `cap` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn tl_arithmeticoid_to_json(y: *const TlArithmeticoid, buf: *mut c_char, cap: usize) -> usize {
    match y.as_ref().and_then(|y| serde_json::to_string(&y.0.to_json()).ok()) {
        Some(s) => copy_out(&s, buf, cap),
        None => copy_out("", buf, cap),
    }
}

/// `φ^m(y)`.
///
/// # Safety
/// `y` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn tl_arithmeticoid_frobenius(
    y: *const TlArithmeticoid,
    m: i64,
    out: *mut *mut TlArithmeticoid,
) -> TlStatus {
    guard(|| {
        let y = &borrow(y, "y")?.0;
        put_box(out, TlArithmeticoid(adelic::global_frobenius(y, m)))
    })
}

/// `x · y` under the action of the multiplicative group.
///
/// # Safety
/// `x` and `y` are live handles; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn tl_arithmeticoid_act(
    x: *const TlElement,
    y: *const TlArithmeticoid,
    out: *mut *mut TlArithmeticoid,
) -> TlStatus {
    guard(|| {
        let z = adelic::lstar_act(&borrow(x, "x")?.0, &borrow(y, "y")?.0)?;
        put_box(out, TlArithmeticoid(z))
    })
}

/// # Safety
/// `y` is null or an arithmeticoid handle not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tl_arithmeticoid_free(y: *mut TlArithmeticoid) {
    free(y)
}

/// Distance between two arithmeticoids.
///
/// # Safety
/// `a` and `b` are live handles; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn tl_distance(a: *const TlArithmeticoid, b: *const TlArithmeticoid, out: *mut f64) -> TlStatus {
    guard(|| {
        let d = adelic::distance(&borrow(a, "a")?.0, &borrow(b, "b")?.0)?;
        put(out, d, "out")
    })
}

/// Height of the projective point `(coords[0] : … : coords[n-1])` relative to `y`.
///
/// # Safety
/// `y` is a live handle, `coords` points to `n` live element handles and
/// `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn tl_height(
    y: *const TlArithmeticoid,
    coords: *const *const TlElement,
    n: usize,
    out: *mut f64,
) -> TlStatus {
    guard(|| {
        let y = &borrow(y, "y")?.0;
        if coords.is_null() {
            return Err(Fail(TlStatus::NullPointer, "coords is null".into()));
        }
        let xs = std::slice::from_raw_parts(coords, n)
            .iter()
            .map(|&c| borrow(c, "coordinate").map(|c| c.0.clone()))
            .collect::<Result<Vec<_>, _>>()?;
        let h = heights::height(y, &ProjectivePoint::new(xs)?)?;
        put(out, h.total, "out")
    })
}

/// Height of a lift of `[[m0, m1], [m2, m3]] ∈ SL2(ℝ)` with the given winding,
/// sampled on `grid` points, with its error bound.
///
/// # Safety
/// `matrix` points to 4 doubles in row-major order; the out-pointers are writable.
#[no_mangle]
pub unsafe extern "C" fn tl_cover_height(
    matrix: *const f64,
    winding: i64,
    grid: usize,
    value: *mut f64,
    error: *mut f64,
) -> TlStatus {
    guard(|| {
        if matrix.is_null() {
            return Err(Fail(TlStatus::NullPointer, "matrix is null".into()));
        }
        let m = std::slice::from_raw_parts(matrix, 4);
        let e = szpiro::lift([[m[0], m[1]], [m[2], m[3]]], winding)?;
        let h = szpiro::height_q(&e, grid)?;
        put(value, h.value, "value")?;
        put(error, h.error, "error")
    })
}
