//! C ABI over `homlab`.
//!
//! Coefficient fields cross the boundary as opaque `HlField` handles owned by
//! the caller and released with `hl_field_free`. Every fallible function
//! returns an `HlStatus`; on failure a description is available from
//! `hl_last_error_message` on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use homlab::io::dump::{dump_field, load_field};
use homlab::{
    homogenized_matrix, sample, solve_corrector, CoefficientField, Direction, EnsembleSpec, Error, SeedContext,
    SolveOptions, TorusLattice,
};

/// Opaque coefficient field.
pub struct HlField(CoefficientField);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    SizeMismatch = 3,
    NotConverged = 4,
    Io = 5,
    Format = 6,
    Panic = 7,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(err: &Error) -> HlStatus {
    match err {
        Error::SizeMismatch { .. } => HlStatus::SizeMismatch,
        Error::NotConverged { .. } => HlStatus::NotConverged,
        Error::Io(_) => HlStatus::Io,
        Error::Format(_) | Error::BadMagic { .. } | Error::UnsupportedVersion { .. } | Error::Truncated { .. } => {
            HlStatus::Format
        }
        _ => HlStatus::InvalidArgument,
    }
}

/// Runs `f`, translating errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), (HlStatus, String)>) -> HlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            HlStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            HlStatus::Panic
        }
    }
}

trait IntoFfi<T> {
    fn ffi(self) -> Result<T, (HlStatus, String)>;
}

impl<T> IntoFfi<T> for homlab::Result<T> {
    fn ffi(self) -> Result<T, (HlStatus, String)> {
        self.map_err(|e| (status_of(&e), e.to_string()))
    }
}

fn null(what: &str) -> (HlStatus, String) {
    (HlStatus::NullPointer, format!("{what} is null"))
}

unsafe fn field_ref<'a>(f: *const HlField) -> Result<&'a CoefficientField, (HlStatus, String)> {
    f.as_ref().map(|h| &h.0).ok_or_else(|| null("field"))
}

unsafe fn path_arg<'a>(p: *const c_char) -> Result<&'a Path, (HlStatus, String)> {
    if p.is_null() {
        return Err(null("path"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map(Path::new)
        .map_err(|_| (HlStatus::InvalidArgument, "path is not valid UTF-8".into()))
}

unsafe fn write_handle(out: *mut *mut HlField, a: CoefficientField) -> Result<(), (HlStatus, String)> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(HlField(a)));
    Ok(())
}

fn options(rel_tol: f64) -> SolveOptions {
    if rel_tol > 0.0 {
        SolveOptions::with_tol(rel_tol)
    } else {
        SolveOptions::default()
    }
}

/// Description of the last failure on this thread; empty after a success.
/// The pointer stays valid until the next `hl_*` call on this thread.
#[no_mangle]
pub extern "C" fn hl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Creates a field from `len = d * L^d` edge values in canonical order.
///
/// # Safety
/// `values` must point to `len` readable doubles and `out` to a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn hl_field_new(
    d: u32,
    side: u32,
    lambda: f64,
    values: *const f64,
    len: usize,
    out: *mut *mut HlField,
) -> HlStatus {
    guard(|| {
        if values.is_null() {
            return Err(null("values"));
        }
        let lat = TorusLattice::new(d as usize, side as usize).ffi()?;
        let v = std::slice::from_raw_parts(values, len).to_vec();
        write_handle(out, CoefficientField::new(lat, lambda, v).ffi()?)
    })
}

/// Draws sample `sample_index` of the ensemble described by `ensemble_json`,
/// e.g. `{"kind": "bernoulli", "lambda": 0.25, "alpha": 0.25, "beta": 1, "p_low": 0.5}`.
///
/// # Safety
/// `ensemble_json` must be a NUL-terminated string and `out` a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn hl_field_sample(
    ensemble_json: *const c_char,
    d: u32,
    side: u32,
    seed: u64,
    sample_index: u64,
    out: *mut *mut HlField,
) -> HlStatus {
    guard(|| {
        if ensemble_json.is_null() {
            return Err(null("ensemble_json"));
        }
        let text = CStr::from_ptr(ensemble_json)
            .to_str()
            .map_err(|_| (HlStatus::InvalidArgument, "ensemble_json is not valid UTF-8".to_string()))?;
        let spec: EnsembleSpec =
            serde_json::from_str(text).map_err(|e| (HlStatus::InvalidArgument, format!("ensemble_json: {e}")))?;
        let lat = TorusLattice::new(d as usize, side as usize).ffi()?;
        write_handle(out, sample(&spec, &lat, SeedContext::new(seed, sample_index)).ffi()?)
    })
}

/// # Safety
/// `path` must be a NUL-terminated string and `out` a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn hl_field_load(path: *const c_char, out: *mut *mut HlField) -> HlStatus {
    guard(|| {
        let p = path_arg(path)?;
        write_handle(out, load_field(p).ffi()?)
    })
}

/// # Safety
/// `field` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn hl_field_dump(field: *const HlField, path: *const c_char) -> HlStatus {
    guard(|| dump_field(field_ref(field)?, path_arg(path)?).ffi())
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `field` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hl_field_free(field: *mut HlField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// # Safety
/// `field` must be a live handle or null (which yields 0).
#[no_mangle]
pub unsafe extern "C" fn hl_field_dim(field: *const HlField) -> u32 {
    field.as_ref().map_or(0, |f| f.0.lattice().dim() as u32)
}

/// # Safety
/// `field` must be a live handle or null (which yields 0).
#[no_mangle]
pub unsafe extern "C" fn hl_field_side(field: *const HlField) -> u32 {
    field.as_ref().map_or(0, |f| f.0.lattice().side() as u32)
}

/// # Safety
/// `field` must be a live handle or null (which yields NaN).
#[no_mangle]
pub unsafe extern "C" fn hl_field_lambda(field: *const HlField) -> f64 {
    field.as_ref().map_or(f64::NAN, |f| f.0.lambda())
}

/// # Safety
/// `field` must be a live handle or null (which yields 0).
#[no_mangle]
pub unsafe extern "C" fn hl_field_num_edges(field: *const HlField) -> usize {
    field.as_ref().map_or(0, |f| f.0.lattice().num_edges())
}

/// Copies the edge values into `out`, which must hold exactly `hl_field_num_edges` doubles.
///
/// # Safety
/// `field` must be a live handle and `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn hl_field_values(field: *const HlField, out: *mut f64, len: usize) -> HlStatus {
    guard(|| {
        let a = field_ref(field)?;
        copy_out(a.values(), out, len)
    })
}

unsafe fn copy_out(src: &[f64], out: *mut f64, len: usize) -> Result<(), (HlStatus, String)> {
    if out.is_null() {
        return Err(null("out"));
    }
    if len != src.len() {
        return Err((
            HlStatus::SizeMismatch,
            format!("output buffer holds {len} values, need {}", src.len()),
        ));
    }
    ptr::copy_nonoverlapping(src.as_ptr(), out, len);
    Ok(())
}

/// Solves the corrector for direction `xi` (length d) and writes `phi` (L^d
/// values, pinned to 0 at the origin). `rel_tol <= 0` selects the default.
///
/// # Safety
/// `field` must be a live handle, `xi` must point to `dim` readable doubles,
/// `phi_out` to `len` writable doubles and `residual_out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn hl_solve_corrector(
    field: *const HlField,
    xi: *const f64,
    dim: usize,
    rel_tol: f64,
    phi_out: *mut f64,
    len: usize,
    residual_out: *mut f64,
) -> HlStatus {
    guard(|| {
        let a = field_ref(field)?;
        if xi.is_null() {
            return Err(null("xi"));
        }
        if dim != a.lattice().dim() {
            return Err((
                HlStatus::SizeMismatch,
                format!("xi has {dim} components, lattice dimension is {}", a.lattice().dim()),
            ));
        }
        let dir = Direction::new(std::slice::from_raw_parts(xi, dim).to_vec()).ffi()?;
        let phi = solve_corrector(a, &dir, &options(rel_tol)).ffi()?;
        copy_out(&phi.phi.0, phi_out, len)?;
        if !residual_out.is_null() {
            *residual_out = phi.residual;
        }
        Ok(())
    })
}

/// Writes the `d x d` homogenized matrix row-major into `out` (`len = d * d`).
///
/// # Safety
/// `field` must be a live handle and `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn hl_homogenized_matrix(field: *const HlField, rel_tol: f64, out: *mut f64, len: usize) -> HlStatus {
    guard(|| {
        let a = field_ref(field)?;
        let m = homogenized_matrix(a, &options(rel_tol)).ffi()?;
        copy_out(&m.entries, out, len)
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}
