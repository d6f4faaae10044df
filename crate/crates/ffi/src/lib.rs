//! C ABI over `awnev`.
//!
//! Expressions live behind an opaque [`AwnevExpr`] handle. Every entry point
//! returns an [`AwnevStatus`]; on failure the message is kept per thread and
//! can be read with [`awnev_last_error_message`]. Panics never cross the
//! boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use awnev::asymptotics::{asym_check, asym_samples};
use awnev::awops::aw_diff_iterate;
use awnev::expr::compile;
use awnev::funcrep::{Evaluate, FunctionExpr};
use awnev::kernel::kernel_residual;
use awnev::nevanlinna::characteristic;
use awnev::{Error, QParam, C64};

/// Result codes. The numeric values of the three error families match the
/// exit codes of the `awnev` command.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AwnevStatus {
    Ok = 0,
    NullPointer = 1,
    /// The expression did not parse or compile.
    Parse = 2,
    /// A numerical routine failed or a residual check did not pass.
    Numeric = 3,
    /// Invalid parameters or violated preconditions.
    Precondition = 4,
    InvalidUtf8 = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct AwnevComplex {
    pub re: f64,
    pub im: f64,
}

impl From<AwnevComplex> for C64 {
    fn from(c: AwnevComplex) -> C64 {
        C64::new(c.re, c.im)
    }
}

impl From<C64> for AwnevComplex {
    fn from(c: C64) -> Self {
        AwnevComplex { re: c.re, im: c.im }
    }
}

/// A compiled expression bound to its `q`.
pub struct AwnevExpr {
    f: FunctionExpr,
    q: QParam,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct AwnevCharacteristic {
    pub r: f64,
    pub m: f64,
    pub n: i64,
    pub big_n: f64,
    pub t: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct AwnevAsymSummary {
    pub max_error: f64,
    pub bound: f64,
    pub violations: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Vec<u8>> = const { RefCell::new(Vec::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| {
        let mut bytes = msg.into_bytes();
        bytes.retain(|&b| b != 0);
        bytes.push(0);
        *e.borrow_mut() = bytes;
    });
}

fn clear_error() {
    LAST_ERROR.with(|e| e.borrow_mut().clear());
}

fn status_of(e: &Error) -> AwnevStatus {
    match e.exit_code() {
        2 => AwnevStatus::Parse,
        3 => AwnevStatus::Numeric,
        _ => AwnevStatus::Precondition,
    }
}

/// Runs `body`, translating errors and panics into a status.
fn guard<F: FnOnce() -> Result<(), (AwnevStatus, String)>>(body: F) -> AwnevStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => AwnevStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            set_error(format!("internal panic: {msg}"));
            AwnevStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (AwnevStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (AwnevStatus, String) {
    (AwnevStatus::NullPointer, format!("{what} is null"))
}

unsafe fn handle<'a>(h: *const AwnevExpr) -> Result<&'a AwnevExpr, (AwnevStatus, String)> {
    h.as_ref().ok_or_else(|| null("expression handle"))
}

unsafe fn write<T>(out: *mut T, v: T) -> Result<(), (AwnevStatus, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(v);
    Ok(())
}

/// Compiles `src` (NUL-terminated UTF-8) against `q`. On success `*out`
/// receives a handle to release with [`awnev_expr_free`].
///
/// # Safety
/// `src` must be a valid C string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn awnev_expr_compile(
    src: *const c_char,
    q: AwnevComplex,
    out: *mut *mut AwnevExpr,
) -> AwnevStatus {
    guard(|| {
        if src.is_null() {
            return Err(null("source"));
        }
        if out.is_null() {
            return Err(null("output pointer"));
        }
        out.write(ptr::null_mut());
        let text = CStr::from_ptr(src)
            .to_str()
            .map_err(|e| (AwnevStatus::InvalidUtf8, e.to_string()))?;
        let q = QParam::new(q.into()).map_err(lib_err)?;
        let f = compile(text, &q).map_err(lib_err)?;
        out.write(Box::into_raw(Box::new(AwnevExpr { f, q })));
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `h` must come from [`awnev_expr_compile`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn awnev_expr_free(h: *mut AwnevExpr) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// `f(x)`.
///
/// # Safety
/// `h` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn awnev_expr_eval(h: *const AwnevExpr, x: AwnevComplex, out: *mut AwnevComplex) -> AwnevStatus {
    guard(|| {
        let e = handle(h)?;
        let v = e.f.eval(x.into()).map_err(lib_err)?;
        write(out, v.into())
    })
}

/// `D_q^order f(x)`.
///
/// # Safety
/// `h` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn awnev_expr_dq(
    h: *const AwnevExpr,
    order: usize,
    x: AwnevComplex,
    out: *mut AwnevComplex,
) -> AwnevStatus {
    guard(|| {
        let e = handle(h)?;
        let v = aw_diff_iterate(&e.f, order, x.into(), &e.q).map_err(lib_err)?;
        write(out, v.into())
    })
}

/// Proximity, pole counts and characteristic on `|x| = r`.
///
/// # Safety
/// `h` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn awnev_expr_characteristic(
    h: *const AwnevExpr,
    r: f64,
    out: *mut AwnevCharacteristic,
) -> AwnevStatus {
    guard(|| {
        let e = handle(h)?;
        let c = characteristic(&e.f, r).map_err(lib_err)?;
        write(
            out,
            AwnevCharacteristic {
                r: c.r,
                m: c.m,
                n: c.n_count,
                big_n: c.big_n,
                t: c.t,
            },
        )
    })
}

/// Largest `|D_q f| / max(1, |f|)` over `count` sample points.
///
/// # Safety
/// `h` must be a live handle, `points` must hold `count` values, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn awnev_expr_kernel_residual(
    h: *const AwnevExpr,
    points: *const AwnevComplex,
    count: usize,
    out: *mut f64,
) -> AwnevStatus {
    guard(|| {
        let e = handle(h)?;
        if points.is_null() && count > 0 {
            return Err(null("points"));
        }
        let grid: Vec<C64> = if count == 0 {
            Vec::new()
        } else {
            std::slice::from_raw_parts(points, count)
                .iter()
                .map(|&p| p.into())
                .collect()
        };
        let r = kernel_residual(&e.f, &grid, &e.q).map_err(lib_err)?;
        write(out, r)
    })
}

/// Asymptotic log-modulus check of `(a z, a/z; q)∞` on `samples` points.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn awnev_asym_check(
    a: AwnevComplex,
    q: AwnevComplex,
    samples: usize,
    out: *mut AwnevAsymSummary,
) -> AwnevStatus {
    guard(|| {
        let q = QParam::new(q.into()).map_err(lib_err)?;
        let rep = asym_check(a.into(), &q, &asym_samples(samples)).map_err(lib_err)?;
        write(
            out,
            AwnevAsymSummary {
                max_error: rep.max_error,
                bound: rep.bound,
                violations: rep.violations,
            },
        )
    })
}

/// Message for the last failure on this thread, or null when the last call
/// succeeded. Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn awnev_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        if e.is_empty() {
            ptr::null()
        } else {
            e.as_ptr() as *const c_char
        }
    })
}

/// Library version as a static C string.
#[no_mangle]
pub extern "C" fn awnev_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;

    fn c(re: f64, im: f64) -> AwnevComplex {
        AwnevComplex { re, im }
    }

    fn compile_ok(src: &str, q: f64) -> *mut AwnevExpr {
        let s = CString::new(src).unwrap();
        let mut h = ptr::null_mut();
        assert_eq!(
            unsafe { awnev_expr_compile(s.as_ptr(), c(q, 0.0), &mut h) },
            AwnevStatus::Ok
        );
        assert!(!h.is_null());
        h
    }

    fn last_error() -> Option<String> {
        let p = awnev_last_error_message();
        (!p.is_null()).then(|| unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned())
    }

    #[test]
    fn eval_matches_core() {
        let h = compile_ok("pinf(0.3)*x", 0.5);
        let mut v = AwnevComplex::default();
        assert_eq!(unsafe { awnev_expr_eval(h, c(2.0, 0.5), &mut v) }, AwnevStatus::Ok);
        let q = QParam::real(0.5).unwrap();
        let want = compile("pinf(0.3)*x", &q).unwrap().eval(C64::new(2.0, 0.5)).unwrap();
        assert_eq!(C64::from(v), want);
        assert!(last_error().is_none());
        unsafe { awnev_expr_free(h) };
    }

    #[test]
    fn dq_of_polynomial() {
        // D_q x = 1 for every q
        let h = compile_ok("x", 0.3);
        let mut v = AwnevComplex::default();
        assert_eq!(unsafe { awnev_expr_dq(h, 1, c(0.4, 0.2), &mut v) }, AwnevStatus::Ok);
        assert!((C64::from(v) - C64::new(1.0, 0.0)).norm() < 1e-12);
        unsafe { awnev_expr_free(h) };
    }

    #[test]
    fn error_codes() {
        let mut h = ptr::null_mut();
        let bad = CString::new("pinf(").unwrap();
        assert_eq!(
            unsafe { awnev_expr_compile(bad.as_ptr(), c(0.5, 0.0), &mut h) },
            AwnevStatus::Parse
        );
        assert!(h.is_null());
        assert!(last_error().unwrap().contains("syntax"));

        let ok = CString::new("x").unwrap();
        assert_eq!(
            unsafe { awnev_expr_compile(ok.as_ptr(), c(1.5, 0.0), &mut h) },
            AwnevStatus::Precondition
        );
        assert_eq!(
            unsafe { awnev_expr_compile(ptr::null(), c(0.5, 0.0), &mut h) },
            AwnevStatus::NullPointer
        );

        let mut v = AwnevComplex::default();
        assert_eq!(
            unsafe { awnev_expr_eval(ptr::null(), c(1.0, 0.0), &mut v) },
            AwnevStatus::NullPointer
        );

        let raw = [0x70u8, 0xff, 0];
        assert_eq!(
            unsafe { awnev_expr_compile(raw.as_ptr() as *const c_char, c(0.5, 0.0), &mut h) },
            AwnevStatus::InvalidUtf8
        );
        unsafe { awnev_expr_free(ptr::null_mut()) };
    }

    #[test]
    fn characteristic_and_kernel() {
        let h = compile_ok("pinf(0.3)", 0.5);
        let mut ch = AwnevCharacteristic::default();
        assert_eq!(unsafe { awnev_expr_characteristic(h, 100.0, &mut ch) }, AwnevStatus::Ok);
        assert_eq!(ch.n, 0);
        assert!(ch.t > 0.0 && (ch.t - ch.m).abs() < 1e-12);

        let pts = [c(3.0, 1.0), c(-5.0, 2.0), c(10.0, -4.0)];
        let mut r = 0.0;
        assert_eq!(
            unsafe { awnev_expr_kernel_residual(h, pts.as_ptr(), pts.len(), &mut r) },
            AwnevStatus::Ok
        );
        assert!(r > 1e-3);
        unsafe { awnev_expr_free(h) };
    }

    #[test]
    fn asym_summary() {
        let mut s = AwnevAsymSummary::default();
        assert_eq!(
            unsafe { awnev_asym_check(c(1.0, 0.0), c(0.25, 0.0), 30, &mut s) },
            AwnevStatus::Ok
        );
        assert_eq!(s.violations, 0);
        assert!(s.max_error <= s.bound);
    }

    #[test]
    fn version_string() {
        let v = unsafe { CStr::from_ptr(awnev_version()) };
        assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    }
}
