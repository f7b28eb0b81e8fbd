//! C ABI over `dtm-core`.
//!
//! Objects are opaque heap handles created by `*_new` and released by the
//! matching `*_free`. Every fallible call returns a [`DtmStatus`]; on failure
//! [`dtm_last_error_message`] describes the error until the next failing call
//! on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::slice;

use dtm_core::{DiscreteMeasure, Error, KDistance, PointCloud, WitnessedKDistance};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DtmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Guard = 3,
    Internal = 4,
}

/// A point cloud in `R^d`.
pub struct DtmCloud(PointCloud);

/// Witnessed k-distance of a cloud.
pub struct DtmWitnessed(WitnessedKDistance);

/// Exact k-distance of a cloud.
pub struct DtmKDistance(KDistance);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> DtmStatus {
    if e.is_guard() {
        DtmStatus::Guard
    } else {
        DtmStatus::InvalidArgument
    }
}

/// Runs `f`, turning errors and panics into status codes.
fn guarded(f: impl FnOnce() -> Result<(), (DtmStatus, String)>) -> DtmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DtmStatus::Ok,
        Ok(Err((status, message))) => {
            set_error(&message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            DtmStatus::Internal
        }
    }
}

fn lift(e: Error) -> (DtmStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(name: &str) -> (DtmStatus, String) {
    (DtmStatus::NullPointer, format!("`{name}` is null"))
}

/// # Safety
/// `ptr` must be null or valid for reads of `len` elements.
unsafe fn input<'a, T>(
    ptr: *const T,
    len: usize,
    name: &str,
) -> Result<&'a [T], (DtmStatus, String)> {
    if ptr.is_null() {
        return Err(null(name));
    }
    Ok(unsafe { slice::from_raw_parts(ptr, len) })
}

/// Message of the last failed call on this thread (empty if none). The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn dtm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn dtm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies `n * dim` row-major coordinates into a new cloud.
///
/// # Safety
/// `coords` must be valid for `n * dim` reads and `out` for one write.
#[no_mangle]
pub unsafe extern "C" fn dtm_cloud_new(
    coords: *const f64,
    n: usize,
    dim: usize,
    out: *mut *mut DtmCloud,
) -> DtmStatus {
    guarded(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let len = n
            .checked_mul(dim)
            .ok_or((DtmStatus::InvalidArgument, "size overflow".into()))?;
        let data = unsafe { input(coords, len, "coords")? };
        let cloud = PointCloud::from_flat(dim, data.to_vec()).map_err(lift)?;
        unsafe { *out = Box::into_raw(Box::new(DtmCloud(cloud))) };
        Ok(())
    })
}

/// # Safety
/// `cloud` must be null or a handle from [`dtm_cloud_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dtm_cloud_free(cloud: *mut DtmCloud) {
    if !cloud.is_null() {
        drop(unsafe { Box::from_raw(cloud) });
    }
}

/// # Safety
/// `cloud` must be a live handle and `n`, `dim` valid for one write each.
#[no_mangle]
pub unsafe extern "C" fn dtm_cloud_shape(
    cloud: *const DtmCloud,
    n: *mut usize,
    dim: *mut usize,
) -> DtmStatus {
    guarded(|| {
        let c = unsafe { cloud.as_ref() }.ok_or_else(|| null("cloud"))?;
        if n.is_null() || dim.is_null() {
            return Err(null("out"));
        }
        unsafe {
            *n = c.0.len();
            *dim = c.0.dim();
        }
        Ok(())
    })
}

/// Builds the witnessed k-distance of `cloud` (`1 <= k <= n`).
///
/// # Safety
/// `cloud` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn dtm_witnessed_new(
    cloud: *const DtmCloud,
    k: usize,
    out: *mut *mut DtmWitnessed,
) -> DtmStatus {
    guarded(|| {
        let c = unsafe { cloud.as_ref() }.ok_or_else(|| null("cloud"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let w = WitnessedKDistance::new(&c.0, k).map_err(lift)?;
        unsafe { *out = Box::into_raw(Box::new(DtmWitnessed(w))) };
        Ok(())
    })
}

/// Evaluates at the point `x` of length `dim`.
///
/// # Safety
/// `handle` must be live, `x` valid for `dim` reads, `out` for one write.
#[no_mangle]
pub unsafe extern "C" fn dtm_witnessed_eval(
    handle: *const DtmWitnessed,
    x: *const f64,
    dim: usize,
    out: *mut f64,
) -> DtmStatus {
    guarded(|| {
        let h = unsafe { handle.as_ref() }.ok_or_else(|| null("handle"))?;
        let x = unsafe { input(x, dim, "x")? };
        if out.is_null() {
            return Err(null("out"));
        }
        let expected = h.0.power_distance().dim();
        if dim != expected {
            return Err(lift(Error::DimensionMismatch {
                expected,
                found: dim,
            }));
        }
        unsafe { *out = h.0.eval(x) };
        Ok(())
    })
}

/// # Safety
/// `handle` must be null or a live handle from [`dtm_witnessed_new`].
#[no_mangle]
pub unsafe extern "C" fn dtm_witnessed_free(handle: *mut DtmWitnessed) {
    if !handle.is_null() {
        drop(unsafe { Box::from_raw(handle) });
    }
}

/// Builds the exact k-distance of `cloud` (`1 <= k <= n`).
///
/// # Safety
/// `cloud` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn dtm_kdist_new(
    cloud: *const DtmCloud,
    k: usize,
    out: *mut *mut DtmKDistance,
) -> DtmStatus {
    guarded(|| {
        let c = unsafe { cloud.as_ref() }.ok_or_else(|| null("cloud"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let d = KDistance::new(&c.0, k).map_err(lift)?;
        unsafe { *out = Box::into_raw(Box::new(DtmKDistance(d))) };
        Ok(())
    })
}

/// # Safety
/// `handle` must be live, `x` valid for `dim` reads, `out` for one write.
#[no_mangle]
pub unsafe extern "C" fn dtm_kdist_eval(
    handle: *const DtmKDistance,
    x: *const f64,
    dim: usize,
    out: *mut f64,
) -> DtmStatus {
    guarded(|| {
        let h = unsafe { handle.as_ref() }.ok_or_else(|| null("handle"))?;
        let x = unsafe { input(x, dim, "x")? };
        if out.is_null() {
            return Err(null("out"));
        }
        let expected = h.0.index().cloud().dim();
        if dim != expected {
            return Err(lift(Error::DimensionMismatch {
                expected,
                found: dim,
            }));
        }
        unsafe { *out = h.0.eval(x) };
        Ok(())
    })
}

/// # Safety
/// `handle` must be null or a live handle from [`dtm_kdist_new`].
#[no_mangle]
pub unsafe extern "C" fn dtm_kdist_free(handle: *mut DtmKDistance) {
    if !handle.is_null() {
        drop(unsafe { Box::from_raw(handle) });
    }
}

/// Exact Wasserstein-2 distance between two discrete measures in `R^dim`
/// given by row-major supports and masses (each summing to one; masses must
/// be rational with small denominators).
///
/// # Safety
/// Supports must be valid for `n * dim` reads, masses for `n` reads, `out`
/// for one write.
#[no_mangle]
pub unsafe extern "C" fn dtm_w2(
    support_a: *const f64,
    mass_a: *const f64,
    n_a: usize,
    support_b: *const f64,
    mass_b: *const f64,
    n_b: usize,
    dim: usize,
    out: *mut f64,
) -> DtmStatus {
    guarded(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let measure = |s: *const f64, m: *const f64, n: usize| {
            let len = n
                .checked_mul(dim)
                .ok_or((DtmStatus::InvalidArgument, "size overflow".into()))?;
            let coords = unsafe { input(s, len, "support")? };
            let masses = unsafe { input(m, n, "mass")? };
            let cloud = PointCloud::from_flat(dim, coords.to_vec()).map_err(lift)?;
            DiscreteMeasure::new(cloud, masses.to_vec()).map_err(lift)
        };
        let a = measure(support_a, mass_a, n_a)?;
        let b = measure(support_b, mass_b, n_b)?;
        unsafe { *out = dtm_core::w2_exact(&a, &b).map_err(lift)?.distance };
        Ok(())
    })
}

/// Exact Wasserstein-2 distance between the uniform measures on two clouds.
///
/// # Safety
/// Both clouds must be live handles and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn dtm_w2_uniform(
    a: *const DtmCloud,
    b: *const DtmCloud,
    out: *mut f64,
) -> DtmStatus {
    guarded(|| {
        let a = unsafe { a.as_ref() }.ok_or_else(|| null("a"))?;
        let b = unsafe { b.as_ref() }.ok_or_else(|| null("b"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let r = dtm_core::w2_exact(
            &DiscreteMeasure::uniform(&a.0),
            &DiscreteMeasure::uniform(&b.0),
        )
        .map_err(lift)?;
        unsafe { *out = r.distance };
        Ok(())
    })
}
