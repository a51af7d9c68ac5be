//! C ABI over nilspec. Every function returns an [`NsStatus`]; on failure
//! a description is available from [`ns_last_error_message`] on the same
//! thread. Handles are opaque and must be released with their `_free`
//! function. Panics never cross the boundary.

use nilspec::heat::{self, BlockCache, Group, HeatConfig};
use nilspec::heisenberg::{HeisenbergContext, LaplacianMode};
use nilspec::{catalog, dgroup, Error, LinearRule};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NsStatus {
    Ok = 0,
    NullPointer = 1,
    Index = 2,
    Dimension = 3,
    Leakage = 4,
    EmptyBlock = 5,
    Precondition = 6,
    NonHermitian = 7,
    NotHType = 8,
    Quadrature = 9,
    Fit = 10,
    Certificate = 11,
    Input = 12,
    Io = 13,
    Json = 14,
    BufferTooSmall = 15,
    Panic = 16,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NsGroupKind {
    Heisenberg = 0,
    DGroup = 1,
}

/// Heisenberg context (n, k, p) with its Laplacian prebuilt.
pub struct NsHeisenberg {
    ctx: HeisenbergContext,
    lap: LinearRule,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> NsStatus {
    match e {
        Error::IndexOutOfRange { .. } => NsStatus::Index,
        Error::DimensionMismatch(_) => NsStatus::Dimension,
        Error::Leakage(_) => NsStatus::Leakage,
        Error::EmptyBlock(_) => NsStatus::EmptyBlock,
        Error::Precondition(_) => NsStatus::Precondition,
        Error::NonHermitian(_) => NsStatus::NonHermitian,
        Error::NotHType(_) => NsStatus::NotHType,
        Error::Quadrature(_) => NsStatus::Quadrature,
        Error::Fit(_) => NsStatus::Fit,
        Error::Certificate(_) => NsStatus::Certificate,
        Error::Input(_) => NsStatus::Input,
        Error::Io(_) => NsStatus::Io,
        Error::Json(_) => NsStatus::Json,
    }
}

enum Failure {
    Lib(Error),
    Status(NsStatus, String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> NsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            NsStatus::Ok
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Status(s, msg))) => {
            set_error(&msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            NsStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure::Status(NsStatus::NullPointer, format!("{what} is null"))
}

/// # Safety
/// `p` must be null or valid for writes of one `T`.
unsafe fn write<T>(p: *mut T, v: T, what: &str) -> Result<(), Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    p.write(v);
    Ok(())
}

fn group(kind: NsGroupKind, n: usize) -> Group {
    match kind {
        NsGroupKind::Heisenberg => Group::Heisenberg(n),
        NsGroupKind::DGroup => Group::DGroup(n),
    }
}

/// Message for the last failing call on this thread ("" after success).
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn ns_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ns_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Lowest eigenvalue k² + (n−q)k of the p-form Laplacian on H^{2n+1}
/// (q the Hodge-reflected degree) and its multiplicity.
///
/// # Safety
/// `value` and `multiplicity` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ns_catalog_lowest(n: usize, p: usize, k: f64, value: *mut f64, multiplicity: *mut u64) -> NsStatus {
    guard(|| {
        let (v, m) = catalog::lowest(n, p, k)?;
        write(value, v, "value")?;
        write(multiplicity, m, "multiplicity")
    })
}

/// Bracket for the lowest 1-form eigenvalue of the D group at |λ| = lambda_norm.
///
/// # Safety
/// `lower` and `upper` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ns_dgroup_lowest_bracket(n: usize, lambda_norm: f64, lower: *mut f64, upper: *mut f64) -> NsStatus {
    guard(|| {
        if n == 0 || !(lambda_norm > 0.0 && lambda_norm.is_finite()) {
            return Err(Error::Precondition(format!("need n >= 1 and |lambda| > 0 (n={n}, |lambda|={lambda_norm})")).into());
        }
        let (lo, hi) = dgroup::lowest_bracket(n, lambda_norm);
        write(lower, lo, "lower")?;
        write(upper, hi, "upper")
    })
}

/// Closed-form decay exponent num/den for the given group and degree.
///
/// # Safety
/// `num` and `den` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ns_alpha_closed_form(kind: NsGroupKind, n: usize, p: usize, num: *mut u64, den: *mut u64) -> NsStatus {
    guard(|| {
        let r = heat::alpha_closed_form(group(kind, n), p)?;
        write(num, r.num, "num")?;
        write(den, r.den, "den")
    })
}

/// Fitted decay exponent of the lowest-band heat trace on the default
/// t grid (25 points from 1e2 to 1e5). The D group uses the bracket midpoint.
///
/// # Safety
/// `alpha_hat` must be valid for writes; `stderr_out` may be null.
#[no_mangle]
pub unsafe extern "C" fn ns_heat_exponent(kind: NsGroupKind, n: usize, p: usize, alpha_hat: *mut f64, stderr_out: *mut f64) -> NsStatus {
    guard(|| {
        let cfg = HeatConfig::default();
        let r = match kind {
            NsGroupKind::Heisenberg => heat::ns_heisenberg(n, p, &cfg, &BlockCache::new())?,
            NsGroupKind::DGroup => heat::ns_dgroup(n, p, heat::BracketEnd::Midpoint, &cfg)?,
        };
        write(alpha_hat, r.estimate.alpha_hat, "alpha_hat")?;
        if !stderr_out.is_null() {
            stderr_out.write(r.estimate.stderr);
        }
        Ok(())
    })
}

/// Decay exponent fitted to caller-supplied samples (t strictly increasing,
/// θ positive and strictly decreasing, at least 10 points).
///
/// # Safety
/// `t` and `theta` must point to `len` readable doubles; `alpha_hat` must
/// be valid for writes; `stderr_out` may be null.
#[no_mangle]
pub unsafe extern "C" fn ns_fit_alpha(t: *const f64, theta: *const f64, len: usize, alpha_hat: *mut f64, stderr_out: *mut f64) -> NsStatus {
    guard(|| {
        if t.is_null() || theta.is_null() {
            return Err(null("sample array"));
        }
        let t = std::slice::from_raw_parts(t, len);
        let theta = std::slice::from_raw_parts(theta, len);
        let samples: Vec<(f64, f64)> = t.iter().copied().zip(theta.iter().copied()).collect();
        let e = heat::fit_alpha(&samples, 8)?;
        write(alpha_hat, e.alpha_hat, "alpha_hat")?;
        if !stderr_out.is_null() {
            stderr_out.write(e.stderr);
        }
        Ok(())
    })
}

/// Creates a Heisenberg context with n pairs, parameter k > 0, degree p.
///
/// # Safety
/// `out` must be valid for writes. On success `*out` owns a handle to be
/// released with [`ns_heisenberg_free`].
#[no_mangle]
pub unsafe extern "C" fn ns_heisenberg_new(n: usize, k: f64, p: usize, out: *mut *mut NsHeisenberg) -> NsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let ctx = HeisenbergContext::new(n, k, p)?;
        let lap = ctx.laplacian(LaplacianMode::Explicit);
        out.write(Box::into_raw(Box::new(NsHeisenberg { ctx, lap })));
        Ok(())
    })
}

/// Releases a handle from [`ns_heisenberg_new`]; null is ignored.
///
/// # Safety
/// `h` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ns_heisenberg_free(h: *mut NsHeisenberg) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Eigenvalues (ascending) of the Laplacian on block γ. Writes the count to
/// `len`; if `capacity` is too small nothing is copied and
/// `NS_STATUS_BUFFER_TOO_SMALL` is returned with `len` set.
///
/// # Safety
/// `h` must be a live handle, `gamma` must point to `gamma_len` ints,
/// `out` to `capacity` writable doubles (may be null if capacity is 0),
/// and `len` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ns_heisenberg_block_spectrum(
    h: *const NsHeisenberg,
    gamma: *const i32,
    gamma_len: usize,
    out: *mut f64,
    capacity: usize,
    len: *mut usize,
) -> NsStatus {
    guard(|| {
        let h = h.as_ref().ok_or_else(|| null("handle"))?;
        if gamma.is_null() && gamma_len > 0 {
            return Err(null("gamma"));
        }
        let gamma = if gamma_len == 0 { &[][..] } else { std::slice::from_raw_parts(gamma, gamma_len) };
        if gamma.len() != h.ctx.n {
            return Err(Error::DimensionMismatch(format!("gamma has length {}, expected {}", gamma.len(), h.ctx.n)).into());
        }
        let s = h.ctx.block_spectrum_with(&h.lap, gamma)?;
        write(len, s.eigenvalues.len(), "len")?;
        if s.eigenvalues.len() > capacity {
            return Err(Failure::Status(
                NsStatus::BufferTooSmall,
                format!("block has {} eigenvalues, buffer holds {capacity}", s.eigenvalues.len()),
            ));
        }
        if out.is_null() && !s.eigenvalues.is_empty() {
            return Err(null("out"));
        }
        std::ptr::copy_nonoverlapping(s.eigenvalues.as_ptr(), out, s.eigenvalues.len());
        Ok(())
    })
}

/// Smallest eigenvalue over all blocks with |γ| ≤ gamma_max.
///
/// # Safety
/// `h` must be a live handle and `value` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ns_heisenberg_lowest(h: *const NsHeisenberg, gamma_max: i32, value: *mut f64) -> NsStatus {
    guard(|| {
        let h = h.as_ref().ok_or_else(|| null("handle"))?;
        if !(0..=16).contains(&gamma_max) {
            return Err(Error::Precondition(format!("gamma_max must be in 0..=16, got {gamma_max}")).into());
        }
        let min = h.ctx.sweep(gamma_max)?.iter().map(|s| s.min()).fold(f64::INFINITY, f64::min);
        write(value, min, "value")
    })
}

/// Runs a named verification suite ("commutators", "appendixA", "kernel",
/// "hodge", "htype", "dgroup") on its default grid; `passed` receives 1 or 0.
///
/// # Safety
/// `name` must be a NUL-terminated string and `passed` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ns_verify_suite(name: *const c_char, passed: *mut i32) -> NsStatus {
    guard(|| {
        if name.is_null() {
            return Err(null("name"));
        }
        let name = CStr::from_ptr(name).to_str().map_err(|_| Error::Input("suite name is not UTF-8".into()))?;
        let suite: nilspec::verify::Suite = name.parse()?;
        let r = nilspec::verify::run_suite(suite, &Default::default())?;
        write(passed, i32::from(r.passed), "passed")
    })
}
