//! C ABI over the `tribound` library.
//!
//! Triangles are opaque handles. Every fallible call returns a [`TbStatus`];
//! the message of the last failure on the calling thread is available from
//! [`tb_last_error`]. Strings returned through out-parameters are owned by
//! the caller and must be released with [`tb_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use serde_json::{json, Value};
use tribound::catalog::{boundary_coordinate, extreme_kernel, BoundaryPoint};
use tribound::dims::dimensions;
use tribound::float::martin_window_float;
use tribound::kernel::{kernel_from_first_column, martin_kernel};
use tribound::markov::backward_transition;
use tribound::rational::{format_q, parse_q};
use tribound::triangle::{parse_spec, MultiplicitySpec, NodeIndex};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidInput = 3,
    /// A membership test rejected its input; the result is still written.
    Reject = 4,
    BufferTooSmall = 5,
    Internal = 6,
    Panic = 7,
}

/// Opaque triangle handle.
pub struct TbTriangle {
    spec: MultiplicitySpec,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Fail(TbStatus, String);

impl From<tribound::Error> for Fail {
    fn from(e: tribound::Error) -> Fail {
        Fail(TbStatus::InvalidInput, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<TbStatus, Fail>) -> TbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(status)) => {
            if status == TbStatus::Ok {
                set_error("");
            }
            status
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            TbStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err(Fail(TbStatus::NullPointer, "null string".into()));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| Fail(TbStatus::InvalidUtf8, "string is not UTF-8".into()))
}

unsafe fn triangle<'a>(t: *const TbTriangle) -> Result<&'a MultiplicitySpec, Fail> {
    t.as_ref()
        .map(|t| &t.spec)
        .ok_or_else(|| Fail(TbStatus::NullPointer, "null triangle".into()))
}

unsafe fn write_string(out: *mut *mut c_char, text: String) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(TbStatus::NullPointer, "null output pointer".into()));
    }
    let s = CString::new(text).map_err(|e| Fail(TbStatus::Internal, e.to_string()))?;
    *out = s.into_raw();
    Ok(())
}

unsafe fn write_json(out: *mut *mut c_char, v: Value) -> Result<(), Fail> {
    write_string(out, v.to_string())
}

fn node(n: usize, k: usize) -> Result<NodeIndex, Fail> {
    Ok(NodeIndex::new(n, k)?)
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn tb_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn tb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn tb_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a triangle from a JSON spec such as
/// `{"name":"q-pascal","params":{"q":"1/2"}}`.
///
/// # Safety
/// `spec_json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tb_triangle_from_json(spec_json: *const c_char, out: *mut *mut TbTriangle) -> TbStatus {
    guard(|| {
        if out.is_null() {
            return Err(Fail(TbStatus::NullPointer, "null output pointer".into()));
        }
        let spec = parse_spec(read_str(spec_json)?)?;
        *out = Box::into_raw(Box::new(TbTriangle { spec }));
        Ok(TbStatus::Ok)
    })
}

/// New handle for the transposed triangle.
///
/// # Safety
/// `tri` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tb_triangle_transpose(tri: *const TbTriangle, out: *mut *mut TbTriangle) -> TbStatus {
    guard(|| {
        let spec = triangle(tri)?.transpose();
        if out.is_null() {
            return Err(Fail(TbStatus::NullPointer, "null output pointer".into()));
        }
        *out = Box::into_raw(Box::new(TbTriangle { spec }));
        Ok(TbStatus::Ok)
    })
}

/// Releases a triangle handle. Null is ignored.
///
/// # Safety
/// `tri` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn tb_triangle_free(tri: *mut TbTriangle) {
    if !tri.is_null() {
        drop(Box::from_raw(tri));
    }
}

/// Short label such as `q-pascal(q=1/2)`.
///
/// # Safety
/// `tri` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tb_triangle_describe(tri: *const TbTriangle, out: *mut *mut c_char) -> TbStatus {
    guard(|| {
        write_string(out, triangle(tri)?.describe())?;
        Ok(TbStatus::Ok)
    })
}

/// Dimension table as JSON with exact `"p/q"` entries.
///
/// # Safety
/// `tri` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tb_dimensions_json(tri: *const TbTriangle, depth: usize, out: *mut *mut c_char) -> TbStatus {
    guard(|| {
        let d = dimensions(triangle(tri)?, depth)?;
        write_json(out, serde_json::to_value(d).map_err(|e| Fail(TbStatus::Internal, e.to_string()))?)?;
        Ok(TbStatus::Ok)
    })
}

/// Exact Martin kernel `V^{nk}` as JSON.
///
/// # Safety
/// `tri` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tb_martin_kernel_json(
    tri: *const TbTriangle,
    n: usize,
    k: usize,
    out: *mut *mut c_char,
) -> TbStatus {
    guard(|| {
        let v = martin_kernel(triangle(tri)?, node(n, k)?)?;
        write_json(out, serde_json::to_value(v).map_err(|e| Fail(TbStatus::Internal, e.to_string()))?)?;
        Ok(TbStatus::Ok)
    })
}

/// Floating Martin kernel on levels `0..=depth`, written row by row into
/// `buf` (`(depth+1)(depth+2)/2` entries). `rel_error` may be null.
///
/// # Safety
/// `tri` must be a live handle; `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn tb_martin_kernel_float(
    tri: *const TbTriangle,
    n: usize,
    k: usize,
    depth: usize,
    buf: *mut f64,
    len: usize,
    rel_error: *mut f64,
) -> TbStatus {
    guard(|| {
        let tri = triangle(tri)?;
        if depth > n {
            return Err(Fail(TbStatus::InvalidInput, format!("depth {depth} exceeds level {n}")));
        }
        let need = (depth + 1) * (depth + 2) / 2;
        if buf.is_null() {
            return Err(Fail(TbStatus::NullPointer, "null buffer".into()));
        }
        if len < need {
            return Err(Fail(TbStatus::BufferTooSmall, format!("need {need} entries, got {len}")));
        }
        let w = martin_window_float(tri, node(n, k)?, depth)?;
        let dst = std::slice::from_raw_parts_mut(buf, need);
        for (slot, v) in dst.iter_mut().zip(w.rows.iter().flatten()) {
            *slot = *v;
        }
        if !rel_error.is_null() {
            *rel_error = w.rel_error;
        }
        Ok(TbStatus::Ok)
    })
}

/// Closed-form extreme kernel at a boundary point (`"x=1/3"`, `"m=2"`,
/// `"m=inf"`, `"s=5/2"`, `"trivial-0"`, `"trivial-inf"`), with its coordinate.
///
/// # Safety
/// `tri` must be a live handle; `point` NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tb_extreme_kernel_json(
    tri: *const TbTriangle,
    point: *const c_char,
    depth: usize,
    out: *mut *mut c_char,
) -> TbStatus {
    guard(|| {
        let tri = triangle(tri)?;
        let p = BoundaryPoint::parse(read_str(point)?, tri)?;
        let v = extreme_kernel(tri, &p, depth)?;
        let coord = if depth >= 1 {
            Some(format_q(&boundary_coordinate(tri, &v)?))
        } else {
            None
        };
        write_json(out, json!({ "point": p.to_string(), "coordinate": coord, "kernel": v }))?;
        Ok(TbStatus::Ok)
    })
}

/// Complete-monotonicity test of a comma-separated first column.
/// Returns `Reject` (with the JSON report written) when a negative entry
/// appears.
///
/// # Safety
/// `tri` must be a live handle; `seq` NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tb_cm_check_json(tri: *const TbTriangle, seq: *const c_char, out: *mut *mut c_char) -> TbStatus {
    guard(|| {
        let tri = triangle(tri)?;
        let col = read_str(seq)?
            .split(',')
            .map(parse_q)
            .collect::<tribound::Result<Vec<_>>>()?;
        let depth = col.len() - 1;
        let (kernel, verdict) = kernel_from_first_column(tri, &col, depth)?;
        write_json(
            out,
            json!({
                "verdict": verdict.to_string(),
                "accepted": verdict.accepted,
                "first_negative": verdict.first_negative,
                "kernel": kernel,
            }),
        )?;
        Ok(if verdict.accepted { TbStatus::Ok } else { TbStatus::Reject })
    })
}

/// Backward transition law out of node `(n, k)` as JSON.
///
/// # Safety
/// `tri` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tb_backward_transition_json(
    tri: *const TbTriangle,
    n: usize,
    k: usize,
    out: *mut *mut c_char,
) -> TbStatus {
    guard(|| {
        let tri = triangle(tri)?;
        node(n, k)?;
        let d = dimensions(tri, n)?;
        let law = backward_transition(tri, &d, n, k)?;
        write_json(out, serde_json::to_value(law).map_err(|e| Fail(TbStatus::Internal, e.to_string()))?)?;
        Ok(TbStatus::Ok)
    })
}

