//! C ABI over the gamma-lab workbench. Opaque handles own their Rust
//! values; every fallible call returns a [`GlStatus`] and writes results
//! through out-pointers. `gl_last_error` exposes the message of the most
//! recent failure on the calling thread.
//!
//! The installed header lives at `include/gamma_lab.h` and is kept in sync
//! with this file (see the `header_matches_exports` test).

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use gamma_lab::dilation::{canonical_unitary7, gamma_isometry_check7, schaffer7};
use gamma_lab::fundamental::{solve_fundamental7, CommutingTuple7};
use gamma_lab::hardy::w_property_residual;
use gamma_lab::io::{AnyTuple, TupleFile};
use gamma_lab::kernel::{numerical_radius, operator_norm, spectral_radius, ComplexMatrix};
use gamma_lab::mu::{mu_bounds, symmetrize3, symmetrize5, symmetrize7, BlockStructure};
use gamma_lab::Error;
use num_complex::Complex64;

/// Result codes of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GlStatus {
    GlOk = 0,
    GlNullArgument = 1,
    GlInvalidArgument = 2,
    GlShapeMismatch = 3,
    GlNotContraction = 4,
    GlNotPsd = 5,
    GlNoConvergence = 6,
    GlNotCommuting = 7,
    GlNotNormal = 8,
    GlNotPure = 9,
    GlParseError = 10,
    GlInternalError = 11,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let sanitized: String = msg.chars().filter(|&ch| ch != '\0').collect();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_of(err: &Error) -> GlStatus {
    match err {
        Error::NotSquare { .. } | Error::ShapeMismatch { .. } => GlStatus::GlShapeMismatch,
        Error::NonFinite
        | Error::InvalidArgument(_)
        | Error::DegreeTooLarge { .. }
        | Error::InsufficientCoefficients { .. }
        | Error::PencilNormViolation { .. }
        | Error::DefectRankZero => GlStatus::GlInvalidArgument,
        Error::NotHermitian { .. } | Error::NotPsd { .. } => GlStatus::GlNotPsd,
        Error::NotContraction { .. } => GlStatus::GlNotContraction,
        Error::NoConvergence { .. } => GlStatus::GlNoConvergence,
        Error::NotCommuting { .. } => GlStatus::GlNotCommuting,
        Error::NotNormal { .. } => GlStatus::GlNotNormal,
        Error::NotPure { .. } => GlStatus::GlNotPure,
    }
}

fn fail(err: Error) -> GlStatus {
    let status = status_of(&err);
    set_error(&err.to_string());
    status
}

/// Run a closure, converting panics into `GlInternalError`.
fn guarded(f: impl FnOnce() -> GlStatus) -> GlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            GlStatus::GlInternalError
        }
    }
}

/// Opaque dense complex matrix handle.
pub struct GlMatrix(ComplexMatrix);

/// Opaque commuting 7-tuple handle.
pub struct GlTuple7(CommutingTuple7);

/// Version string of the library, static storage.
#[no_mangle]
pub extern "C" fn gl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message for the most recent error on this thread. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn gl_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Build a matrix from row-major interleaved [re, im] doubles
/// (length 2 * rows * cols).
///
/// # Safety
/// `re_im` must point to `2 * rows * cols` readable doubles and `out` to a
/// writable pointer slot.
#[no_mangle]
pub unsafe extern "C" fn gl_matrix_new(
    rows: usize,
    cols: usize,
    re_im: *const f64,
    out: *mut *mut GlMatrix,
) -> GlStatus {
    if re_im.is_null() || out.is_null() {
        set_error("null argument");
        return GlStatus::GlNullArgument;
    }
    guarded(|| {
        let data = std::slice::from_raw_parts(re_im, 2 * rows * cols);
        let m = ComplexMatrix::from_fn(rows, cols, |r, c| {
            let k = 2 * (r * cols + c);
            Complex64::new(data[k], data[k + 1])
        });
        if let Err(e) = m.check_finite() {
            return fail(e);
        }
        *out = Box::into_raw(Box::new(GlMatrix(m)));
        GlStatus::GlOk
    })
}

/// Release a matrix handle. Null is ignored.
///
/// # Safety
/// `m` must be null or a pointer returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gl_matrix_free(m: *mut GlMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Row count; zero on null.
///
/// # Safety
/// `m` must be null or a live matrix handle.
#[no_mangle]
pub unsafe extern "C" fn gl_matrix_rows(m: *const GlMatrix) -> usize {
    m.as_ref().map_or(0, |h| h.0.rows())
}

/// Column count; zero on null.
///
/// # Safety
/// `m` must be null or a live matrix handle.
#[no_mangle]
pub unsafe extern "C" fn gl_matrix_cols(m: *const GlMatrix) -> usize {
    m.as_ref().map_or(0, |h| h.0.cols())
}

/// Read one entry.
///
/// # Safety
/// `m` must be a live matrix handle; `re` and `im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gl_matrix_get(
    m: *const GlMatrix,
    row: usize,
    col: usize,
    re: *mut f64,
    im: *mut f64,
) -> GlStatus {
    let Some(h) = m.as_ref() else {
        set_error("null matrix");
        return GlStatus::GlNullArgument;
    };
    if re.is_null() || im.is_null() {
        set_error("null output pointer");
        return GlStatus::GlNullArgument;
    }
    if row >= h.0.rows() || col >= h.0.cols() {
        set_error("index out of range");
        return GlStatus::GlInvalidArgument;
    }
    let z = h.0[(row, col)];
    *re = z.re;
    *im = z.im;
    GlStatus::GlOk
}

unsafe fn scalar_op(
    m: *const GlMatrix,
    out: *mut f64,
    f: impl FnOnce(&ComplexMatrix) -> Result<f64, Error>,
) -> GlStatus {
    let Some(h) = m.as_ref() else {
        set_error("null matrix");
        return GlStatus::GlNullArgument;
    };
    if out.is_null() {
        set_error("null output pointer");
        return GlStatus::GlNullArgument;
    }
    match f(&h.0) {
        Ok(v) => {
            *out = v;
            GlStatus::GlOk
        }
        Err(e) => fail(e),
    }
}

/// Largest singular value.
///
/// # Safety
/// `m` must be a live matrix handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gl_operator_norm(m: *const GlMatrix, out: *mut f64) -> GlStatus {
    guarded(|| scalar_op(m, out, operator_norm))
}

/// Largest eigenvalue modulus.
///
/// # Safety
/// As for [`gl_operator_norm`].
#[no_mangle]
pub unsafe extern "C" fn gl_spectral_radius(m: *const GlMatrix, out: *mut f64) -> GlStatus {
    guarded(|| scalar_op(m, out, spectral_radius))
}

/// Numerical radius within `tol`.
///
/// # Safety
/// As for [`gl_operator_norm`].
#[no_mangle]
pub unsafe extern "C" fn gl_numerical_radius(
    m: *const GlMatrix,
    tol: f64,
    out: *mut f64,
) -> GlStatus {
    guarded(|| scalar_op(m, out, |a| numerical_radius(a, tol)))
}

/// Structured-singular-value bracket over the block-scalar structure with
/// the given block sizes.
///
/// # Safety
/// `block_sizes` must point to `n_blocks` readable entries; `lower` and
/// `upper` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gl_mu_bounds(
    m: *const GlMatrix,
    block_sizes: *const usize,
    n_blocks: usize,
    phase_grid: usize,
    iters: usize,
    lower: *mut f64,
    upper: *mut f64,
) -> GlStatus {
    if block_sizes.is_null() || lower.is_null() || upper.is_null() {
        set_error("null argument");
        return GlStatus::GlNullArgument;
    }
    let Some(h) = m.as_ref() else {
        set_error("null matrix");
        return GlStatus::GlNullArgument;
    };
    guarded(|| {
        let sizes = std::slice::from_raw_parts(block_sizes, n_blocks).to_vec();
        let st = match BlockStructure::new(sizes) {
            Ok(st) => st,
            Err(e) => return fail(e),
        };
        match mu_bounds(&h.0, &st, phase_grid.max(1), iters.max(1)) {
            Ok(b) => {
                *lower = b.lower;
                *upper = b.upper;
                GlStatus::GlOk
            }
            Err(e) => fail(e),
        }
    })
}

unsafe fn write_coords(
    coords: &[Complex64],
    out: *mut f64,
    out_len: usize,
) -> GlStatus {
    if out.is_null() {
        set_error("null output pointer");
        return GlStatus::GlNullArgument;
    }
    debug_assert_eq!(out_len, 2 * coords.len());
    let slice = std::slice::from_raw_parts_mut(out, out_len);
    for (k, z) in coords.iter().enumerate() {
        slice[2 * k] = z.re;
        slice[2 * k + 1] = z.im;
    }
    GlStatus::GlOk
}

/// Seven coordinates of a 3x3 witness, written as 14 interleaved doubles.
///
/// # Safety
/// `m` must be a live 3x3 matrix handle; `out14` must hold 14 doubles.
#[no_mangle]
pub unsafe extern "C" fn gl_symmetrize7(m: *const GlMatrix, out14: *mut f64) -> GlStatus {
    let Some(h) = m.as_ref() else {
        set_error("null matrix");
        return GlStatus::GlNullArgument;
    };
    guarded(|| match symmetrize7(&h.0) {
        Ok(p) => write_coords(&p.coords, out14, 14),
        Err(e) => fail(e),
    })
}

/// Five coordinates of a 3x3 witness, written as 10 interleaved doubles.
///
/// # Safety
/// As for [`gl_symmetrize7`] with 10 doubles of output.
#[no_mangle]
pub unsafe extern "C" fn gl_symmetrize5(m: *const GlMatrix, out10: *mut f64) -> GlStatus {
    let Some(h) = m.as_ref() else {
        set_error("null matrix");
        return GlStatus::GlNullArgument;
    };
    guarded(|| match symmetrize5(&h.0) {
        Ok(p) => write_coords(&p.coords, out10, 10),
        Err(e) => fail(e),
    })
}

/// Three coordinates of a 2x2 witness, written as 6 interleaved doubles.
///
/// # Safety
/// As for [`gl_symmetrize7`] with 6 doubles of output.
#[no_mangle]
pub unsafe extern "C" fn gl_symmetrize3(m: *const GlMatrix, out6: *mut f64) -> GlStatus {
    let Some(h) = m.as_ref() else {
        set_error("null matrix");
        return GlStatus::GlNullArgument;
    };
    guarded(|| match symmetrize3(&h.0) {
        Ok(p) => write_coords(&p.coords, out6, 6),
        Err(e) => fail(e),
    })
}

/// Build a commuting 7-tuple from seven matrix handles.
///
/// # Safety
/// `mats` must point to seven live matrix handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gl_tuple7_new(
    mats: *const *const GlMatrix,
    out: *mut *mut GlTuple7,
) -> GlStatus {
    if mats.is_null() || out.is_null() {
        set_error("null argument");
        return GlStatus::GlNullArgument;
    }
    guarded(|| {
        let handles = std::slice::from_raw_parts(mats, 7);
        let mut owned = Vec::with_capacity(7);
        for &h in handles {
            let Some(hm) = h.as_ref() else {
                set_error("null matrix in tuple");
                return GlStatus::GlNullArgument;
            };
            owned.push(hm.0.clone());
        }
        match CommutingTuple7::new(owned) {
            Ok(t) => {
                *out = Box::into_raw(Box::new(GlTuple7(t)));
                GlStatus::GlOk
            }
            Err(e) => fail(e),
        }
    })
}

/// Parse a 7-tuple from the JSON tuple-file format.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gl_tuple7_from_json(
    text: *const c_char,
    out: *mut *mut GlTuple7,
) -> GlStatus {
    if text.is_null() || out.is_null() {
        set_error("null argument");
        return GlStatus::GlNullArgument;
    }
    guarded(|| {
        let Ok(s) = CStr::from_ptr(text).to_str() else {
            set_error("input is not valid UTF-8");
            return GlStatus::GlParseError;
        };
        let file: TupleFile = match serde_json_from(s) {
            Ok(f) => f,
            Err(msg) => {
                set_error(&msg);
                return GlStatus::GlParseError;
            }
        };
        match file.decode() {
            Ok(AnyTuple::Seven(t)) => {
                *out = Box::into_raw(Box::new(GlTuple7(t)));
                GlStatus::GlOk
            }
            Ok(AnyTuple::Five(_)) => {
                set_error("expected a gamma7 tuple file");
                GlStatus::GlInvalidArgument
            }
            Err(e) => fail(e),
        }
    })
}

fn serde_json_from(s: &str) -> Result<TupleFile, String> {
    gamma_lab::io::parse_tuple_json(s).map_err(|e| e.to_string())
}

/// Release a tuple handle. Null is ignored.
///
/// # Safety
/// `t` must be null or a pointer returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gl_tuple7_free(t: *mut GlTuple7) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Ambient dimension of the tuple; zero on null.
///
/// # Safety
/// `t` must be null or a live tuple handle.
#[no_mangle]
pub unsafe extern "C" fn gl_tuple7_dim(t: *const GlTuple7) -> usize {
    t.as_ref().map_or(0, |h| h.0.dim())
}

/// Max pairwise commutator norm of the tuple.
///
/// # Safety
/// `t` must be a live tuple handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gl_tuple7_commutation_residual(
    t: *const GlTuple7,
    out: *mut f64,
) -> GlStatus {
    let Some(h) = t.as_ref() else {
        set_error("null tuple");
        return GlStatus::GlNullArgument;
    };
    if out.is_null() {
        set_error("null output pointer");
        return GlStatus::GlNullArgument;
    }
    *out = h.0.commutation_residual;
    GlStatus::GlOk
}

/// Max isometry-family residual of the tuple, with `edge` trailing
/// coordinates excluded from the identity checks.
///
/// # Safety
/// `t` must be a live tuple handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gl_gamma_isometry_residual7(
    t: *const GlTuple7,
    edge: usize,
    out: *mut f64,
) -> GlStatus {
    let Some(h) = t.as_ref() else {
        set_error("null tuple");
        return GlStatus::GlNullArgument;
    };
    if out.is_null() {
        set_error("null output pointer");
        return GlStatus::GlNullArgument;
    }
    guarded(|| {
        let set = gamma_isometry_check7(&h.0, f64::MAX, edge);
        *out = set.max_residual();
        GlStatus::GlOk
    })
}

/// Solve the fundamental equations; writes the max solve residual and the
/// defect rank.
///
/// # Safety
/// `t` must be a live tuple handle; `out_residual` and `out_rank` writable.
#[no_mangle]
pub unsafe extern "C" fn gl_fundamental_residual7(
    t: *const GlTuple7,
    out_residual: *mut f64,
    out_rank: *mut usize,
) -> GlStatus {
    let Some(h) = t.as_ref() else {
        set_error("null tuple");
        return GlStatus::GlNullArgument;
    };
    if out_residual.is_null() || out_rank.is_null() {
        set_error("null output pointer");
        return GlStatus::GlNullArgument;
    }
    guarded(|| match solve_fundamental7(&h.0, 1e-10) {
        Ok(f) => {
            *out_residual = f.max_residual();
            *out_rank = f.basis.rank();
            GlStatus::GlOk
        }
        Err(e) => fail(e),
    })
}

/// Assemble the block isometric lift on `levels` coefficient levels and
/// write its structural lift residual.
///
/// # Safety
/// `t` must be a live tuple handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gl_schaffer_lift_residual7(
    t: *const GlTuple7,
    levels: usize,
    out: *mut f64,
) -> GlStatus {
    let Some(h) = t.as_ref() else {
        set_error("null tuple");
        return GlStatus::GlNullArgument;
    };
    if out.is_null() {
        set_error("null output pointer");
        return GlStatus::GlNullArgument;
    }
    guarded(|| {
        let f = match solve_fundamental7(&h.0, 1e-8) {
            Ok(f) => f,
            Err(e) => return fail(e),
        };
        match schaffer7(&h.0, &f, levels.max(2), 1e-8) {
            Ok(d) => {
                *out = d.lift_residual;
                GlStatus::GlOk
            }
            Err(e) => fail(e),
        }
    })
}

/// Extract the canonical boundary unitary; writes its rank and the max
/// verification residual (zero rank is a valid outcome for strictly stable
/// tuples).
///
/// # Safety
/// `t` must be a live tuple handle; `out_rank` and `out_residual` writable.
#[no_mangle]
pub unsafe extern "C" fn gl_canonical_rank7(
    t: *const GlTuple7,
    tol: f64,
    out_rank: *mut usize,
    out_residual: *mut f64,
) -> GlStatus {
    let Some(h) = t.as_ref() else {
        set_error("null tuple");
        return GlStatus::GlNullArgument;
    };
    if out_rank.is_null() || out_residual.is_null() {
        set_error("null output pointer");
        return GlStatus::GlNullArgument;
    }
    guarded(|| match canonical_unitary7(&h.0, tol) {
        Ok(cu) => {
            *out_rank = cu.rank;
            *out_residual = cu
                .checks
                .checks
                .iter()
                .map(|c| if c.residual.is_finite() { c.residual } else { 0.0 })
                .fold(0.0, f64::max);
            GlStatus::GlOk
        }
        Err(e) => fail(e),
    })
}

/// Residual of the completeness identity W W* + M M* = I for a contraction
/// on `levels` truncation levels.
///
/// # Safety
/// `m` must be a live matrix handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gl_wprop_residual(
    m: *const GlMatrix,
    levels: usize,
    out: *mut f64,
) -> GlStatus {
    let Some(h) = m.as_ref() else {
        set_error("null matrix");
        return GlStatus::GlNullArgument;
    };
    if out.is_null() {
        set_error("null output pointer");
        return GlStatus::GlNullArgument;
    }
    guarded(|| match w_property_residual(&h.0, levels.max(1)) {
        Ok(rep) => {
            *out = rep.residual;
            GlStatus::GlOk
        }
        Err(e) => fail(e),
    })
}
