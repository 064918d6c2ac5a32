//! C ABI over the `chipfire` library.
//!
//! Every fallible call returns a [`CfStatus`]; on failure a message is kept
//! per thread and can be read with [`cf_last_error`]. Objects are handed out
//! as opaque pointers and must be released with the matching `*_free`.
//! Strings returned by the library are released with [`cf_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use chipfire::combinatorics::{digit_reversal, inversions, kappa, kd_catalan, lds};
use chipfire::search::{self, ExtremalReport, Verdict};
use chipfire::{EnumerationSpec, Error, Mode, Permutation, StablePermutation, Strategy, TreeParams};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidUtf8 = 3,
    SizeGuard = 4,
    InvalidPlan = 5,
    Panic = 6,
}

/// A tuple-selection strategy.
pub struct CfStrategy(Strategy);

/// A permutation of `1..=n`.
pub struct CfPermutation(Vec<u32>);

/// Result of an extremal search.
pub struct CfReport {
    report: ExtremalReport,
    violated: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> CfStatus {
    match e {
        Error::SizeGuard { .. } => CfStatus::SizeGuard,
        Error::InvalidPlan { .. } | Error::NotInitial => CfStatus::InvalidPlan,
        _ => CfStatus::InvalidArgument,
    }
}

fn guard<F>(f: F) -> CfStatus
where
    F: FnOnce() -> Result<(), CfStatus>,
{
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CfStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => {
            set_error("internal panic".into());
            CfStatus::Panic
        }
    }
}

fn lib<T>(r: chipfire::Result<T>) -> Result<T, CfStatus> {
    r.map_err(|e| {
        set_error(e.to_string());
        status_of(&e)
    })
}

fn nonnull<T>(p: *const T, what: &str) -> Result<(), CfStatus> {
    if p.is_null() {
        set_error(format!("{what} is null"));
        Err(CfStatus::NullPointer)
    } else {
        Ok(())
    }
}

unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, CfStatus> {
    nonnull(s, what)?;
    CStr::from_ptr(s).to_str().map_err(|_| {
        set_error(format!("{what} is not valid UTF-8"));
        CfStatus::InvalidUtf8
    })
}

unsafe fn read_values<'a>(values: *const u32, len: usize) -> Result<&'a [u32], CfStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    nonnull(values, "values")?;
    Ok(std::slice::from_raw_parts(values, len))
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), CfStatus> {
    nonnull(out, "out")?;
    out.write(value);
    Ok(())
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).expect("decimal digits").into_raw()
}

/// Message for the last failed call on this thread, or null. Valid until the
/// next call on the same thread.
#[no_mangle]
pub extern "C" fn cf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn cf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn cf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Decimal k-dimensional Catalan number `C(k, m)`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cf_kd_catalan(k: u32, m: u64, out: *mut *mut c_char) -> CfStatus {
    guard(|| {
        if k == 0 {
            lib(Err::<(), _>(Error::InvalidBranching(0)))?;
        }
        write(out, into_c_string(kd_catalan(k, m).to_string()))
    })
}

/// Decimal number of stable configurations for `k^ell` chips.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cf_kappa(k: u32, ell: u32, out: *mut *mut c_char) -> CfStatus {
    guard(|| {
        lib(TreeParams::new(k, 0))?;
        let value = lib(kappa(k, ell))?;
        write(out, into_c_string(value.to_string()))
    })
}

/// Parses `identity`, `unbundle`, `random:<seed>` or `embed:<n>`.
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cf_strategy_from_name(name: *const c_char, out: *mut *mut CfStrategy) -> CfStatus {
    guard(|| {
        let name = read_str(name, "name")?;
        let s = lib(Strategy::from_name(name))?;
        write(out, boxed(CfStrategy(s)))
    })
}

/// Parses an indented composition spec.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cf_strategy_from_compose_spec(text: *const c_char, out: *mut *mut CfStrategy) -> CfStatus {
    guard(|| {
        let text = read_str(text, "text")?;
        let s = lib(Strategy::parse_compose_spec(text))?;
        write(out, boxed(CfStrategy(s)))
    })
}

/// # Safety
/// `s` must be null or a pointer from `cf_strategy_*`, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn cf_strategy_free(s: *mut CfStrategy) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Stabilizes `k^ell` chips from the root under `strategy`.
///
/// # Safety
/// `strategy` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cf_simulate(
    k: u32,
    ell: u32,
    strategy: *const CfStrategy,
    out: *mut *mut CfPermutation,
) -> CfStatus {
    guard(|| {
        nonnull(strategy, "strategy")?;
        let params = lib(TreeParams::new(k, ell))?;
        let run = lib((*strategy).0.run(params))?;
        write(out, boxed(CfPermutation(run.permutation.as_slice().to_vec())))
    })
}

/// The digit-reversal permutation of `0..k^ell`, shifted to start at 1.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cf_digit_reversal(k: u32, ell: u32, out: *mut *mut CfPermutation) -> CfStatus {
    guard(|| {
        let z = lib(digit_reversal(k, ell))?;
        write(out, boxed(CfPermutation(z.as_slice().to_vec())))
    })
}

/// Validates and copies `len` values as a permutation.
///
/// # Safety
/// `values` must point to `len` readable values; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cf_permutation_new(
    values: *const u32,
    len: usize,
    out: *mut *mut CfPermutation,
) -> CfStatus {
    guard(|| {
        let v = read_values(values, len)?;
        lib(Permutation::new(v.to_vec()))?;
        write(out, boxed(CfPermutation(v.to_vec())))
    })
}

/// # Safety
/// `p` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cf_permutation_len(p: *const CfPermutation) -> usize {
    p.as_ref().map_or(0, |p| p.0.len())
}

/// Pointer to the values, valid while `p` is alive.
///
/// # Safety
/// `p` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cf_permutation_data(p: *const CfPermutation) -> *const u32 {
    p.as_ref().map_or(ptr::null(), |p| p.0.as_ptr())
}

/// # Safety
/// `p` must be null or a handle from this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn cf_permutation_free(p: *mut CfPermutation) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

fn checked(values: &[u32]) -> Result<Permutation, CfStatus> {
    lib(Permutation::new(values.to_vec()))
}

/// Inversion count of a permutation given as raw values.
///
/// # Safety
/// `values` must point to `len` readable values; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cf_inversions(values: *const u32, len: usize, out: *mut u64) -> CfStatus {
    guard(|| {
        let p = checked(read_values(values, len)?)?;
        write(out, inversions(&p))
    })
}

/// Length of the longest strictly decreasing subsequence.
///
/// # Safety
/// `values` must point to `len` readable values; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cf_lds(values: *const u32, len: usize, out: *mut u64) -> CfStatus {
    guard(|| {
        let p = checked(read_values(values, len)?)?;
        write(out, lds(&p) as u64)
    })
}

fn spec(k: u32, ell: u32, workers: usize, mode: Mode) -> Result<EnumerationSpec, CfStatus> {
    let params = lib(TreeParams::new(k, ell))?;
    lib(EnumerationSpec::new(params, mode).workers(workers).max_configs_from_env())
}

/// Number of stable configurations, by exhaustive enumeration.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cf_count_stable(k: u32, ell: u32, workers: usize, out: *mut u64) -> CfStatus {
    guard(|| {
        let n = lib(search::count_stable(&spec(k, ell, workers, Mode::Count)?))?;
        write(out, n)
    })
}

/// Maximum inversion count over all stable configurations.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cf_max_inversions(k: u32, ell: u32, workers: usize, out: *mut *mut CfReport) -> CfStatus {
    guard(|| {
        let report = lib(search::max_inversions_search(&spec(k, ell, workers, Mode::MaxInversions)?))?;
        write(out, boxed(CfReport { report, violated: false }))
    })
}

/// Longest decreasing subsequence over all stable configurations.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cf_max_lds(
    k: u32,
    ell: u32,
    workers: usize,
    prune: bool,
    out: *mut *mut CfReport,
) -> CfStatus {
    guard(|| {
        let s = spec(k, ell, workers, Mode::MaxLds)?.prune(prune);
        let report = lib(search::max_lds_search(&s))?;
        write(out, boxed(CfReport { report, violated: false }))
    })
}

/// Compares the LDS maximum with the digit-reversal value. A violation is
/// reported through [`cf_report_violated`], not as an error.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cf_verify_conjecture(k: u32, ell: u32, workers: usize, out: *mut *mut CfReport) -> CfStatus {
    guard(|| {
        let r = lib(search::verify_conjecture(&spec(k, ell, workers, Mode::MaxLds)?))?;
        write(
            out,
            boxed(CfReport {
                report: r.search,
                violated: r.verdict == Verdict::Violated,
            }),
        )
    })
}

/// # Safety
/// `r` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cf_report_value(r: *const CfReport) -> u64 {
    r.as_ref().map_or(0, |r| r.report.value)
}

/// # Safety
/// `r` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cf_report_closed_form(r: *const CfReport) -> u64 {
    r.as_ref().map_or(0, |r| r.report.closed_form)
}

/// # Safety
/// `r` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cf_report_explored(r: *const CfReport) -> u64 {
    r.as_ref().map_or(0, |r| r.report.explored)
}

/// # Safety
/// `r` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cf_report_pruned(r: *const CfReport) -> u64 {
    r.as_ref().map_or(0, |r| r.report.pruned)
}

/// # Safety
/// `r` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cf_report_violated(r: *const CfReport) -> bool {
    r.as_ref().is_some_and(|r| r.violated)
}

/// Copies the witness into a new permutation handle.
///
/// # Safety
/// `r` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cf_report_witness(r: *const CfReport, out: *mut *mut CfPermutation) -> CfStatus {
    guard(|| {
        nonnull(r, "report")?;
        let w: &StablePermutation = &(*r).report.witness;
        write(out, boxed(CfPermutation(w.as_slice().to_vec())))
    })
}

/// # Safety
/// `r` must be null or a handle from this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn cf_report_free(r: *mut CfReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}
