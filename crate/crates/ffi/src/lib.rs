//! C ABI over the decomposition toolkit.
//!
//! Objects cross the boundary as opaque handles created by `dl_*_from_json` or
//! constructors and released by the matching `dl_*_free`. Every fallible call
//! returns a [`DlStatus`]; on failure [`dl_last_error`] describes the problem.
//! Strings returned to the caller are released with [`dl_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::time::Duration;

use decomp_lab::combinatorics::{Hypergraph, Partition};
use decomp_lab::divisibility::steiner_divisible;
use decomp_lab::solver::{
    count_decompositions, find_decomposition, verify_certificate, Certificate, Family, Host, Outcome,
    PartiteConstraint, SolveConfig,
};
use decomp_lab::Error;

/// Status of a call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidInput = 4,
    BudgetExceeded = 5,
    Panic = 6,
}

/// Search outcome, numbered like the command-line exit codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DlOutcome {
    Found = 0,
    None = 1,
    Timeout = 2,
}

/// A host structure.
pub struct DlHost(Host);

/// A pattern family.
pub struct DlFamily(Family);

/// A decomposition certificate.
pub struct DlCertificate(Certificate);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> DlStatus {
    match e {
        Error::Json(_) => DlStatus::Parse,
        Error::BudgetExceeded(_) => DlStatus::BudgetExceeded,
        _ => DlStatus::InvalidInput,
    }
}

/// Runs `f`, turning errors and panics into a status and a stored message.
fn guard(f: impl FnOnce() -> Result<(), (DlStatus, String)>) -> DlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DlStatus::Ok,
        Ok(Err((s, m))) => {
            set_error(m);
            s
        }
        Err(_) => {
            set_error("internal panic".into());
            DlStatus::Panic
        }
    }
}

fn lib(e: Error) -> (DlStatus, String) {
    (status_of(&e), e.to_string())
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, (DlStatus, String)> {
    if p.is_null() {
        return Err((DlStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (DlStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, (DlStatus, String)> {
    p.as_ref().ok_or_else(|| (DlStatus::NullPointer, format!("{what} is null")))
}

unsafe fn write<T>(out: *mut T, v: T, what: &str) -> Result<(), (DlStatus, String)> {
    if out.is_null() {
        return Err((DlStatus::NullPointer, format!("{what} is null")));
    }
    out.write(v);
    Ok(())
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

/// Message for the last failed call on this thread, or null. Valid until the next failing call.
#[no_mangle]
pub extern "C" fn dl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn dl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a host document (`type` hypergraph, coloured, digraph or multidigraph).
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dl_host_from_json(json: *const c_char, out: *mut *mut DlHost) -> DlStatus {
    guard(|| {
        let h = Host::from_json(text(json, "json")?).map_err(lib)?;
        write(out, Box::into_raw(Box::new(DlHost(h))), "out")
    })
}

/// The complete `r`-graph on `n` vertices.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dl_host_complete(n: u32, r: u32, out: *mut *mut DlHost) -> DlStatus {
    guard(|| {
        if r == 0 {
            return Err((DlStatus::InvalidInput, "uniformity must be positive".into()));
        }
        let h = Host::Hypergraph(Hypergraph::complete(n as usize, r as usize));
        write(out, Box::into_raw(Box::new(DlHost(h))), "out")
    })
}

/// # Safety
/// `h` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn dl_host_free(h: *mut DlHost) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Parses one pattern or an array of patterns.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dl_family_from_json(json: *const c_char, out: *mut *mut DlFamily) -> DlStatus {
    guard(|| {
        let f = Family::from_json(text(json, "json")?).map_err(lib)?;
        write(out, Box::into_raw(Box::new(DlFamily(f))), "out")
    })
}

/// # Safety
/// `f` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn dl_family_free(f: *mut DlFamily) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// # Safety
/// `c` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn dl_certificate_free(c: *mut DlCertificate) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Serializes a certificate; release the result with [`dl_string_free`].
///
/// # Safety
/// `c` must be a live certificate; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dl_certificate_to_json(c: *const DlCertificate, out: *mut *mut c_char) -> DlStatus {
    guard(|| {
        let c = handle(c, "certificate")?;
        write(out, owned_string(c.0.to_json()), "out")
    })
}

/// Parses a certificate document.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dl_certificate_from_json(json: *const c_char, out: *mut *mut DlCertificate) -> DlStatus {
    guard(|| {
        let c = Certificate::from_json(text(json, "json")?).map_err(lib)?;
        write(out, Box::into_raw(Box::new(DlCertificate(c))), "out")
    })
}

unsafe fn constraint(
    pattern: *const c_char,
    host: *const c_char,
) -> Result<Option<PartiteConstraint>, (DlStatus, String)> {
    match (pattern.is_null(), host.is_null()) {
        (true, true) => Ok(None),
        (false, false) => {
            let p = Partition::from_json(text(pattern, "pattern partition")?).map_err(lib)?;
            let h = Partition::from_json(text(host, "host partition")?).map_err(lib)?;
            Ok(Some(PartiteConstraint { pattern: p, host: h }))
        }
        _ => Err((DlStatus::InvalidInput, "give both partitions or neither".into())),
    }
}

fn config(timeout_ms: u64, budget: u64) -> SolveConfig {
    let mut c = SolveConfig::default();
    if budget > 0 {
        c.budget = budget;
    }
    c.timeout = (timeout_ms > 0).then(|| Duration::from_millis(timeout_ms));
    c
}

/// Searches for a decomposition. Partition documents may both be null for no partite
/// constraint. `timeout_ms == 0` means no deadline and `budget == 0` the default budget.
/// `cert_out` receives a certificate only when the outcome is found, else null.
///
/// # Safety
/// Handles must be live; strings NUL-terminated or null; outputs writable.
#[no_mangle]
pub unsafe extern "C" fn dl_solve(
    host: *const DlHost,
    family: *const DlFamily,
    pattern_partition_json: *const c_char,
    host_partition_json: *const c_char,
    timeout_ms: u64,
    budget: u64,
    outcome_out: *mut DlOutcome,
    cert_out: *mut *mut DlCertificate,
) -> DlStatus {
    guard(|| {
        let (h, f) = (handle(host, "host")?, handle(family, "family")?);
        let c = constraint(pattern_partition_json, host_partition_json)?;
        let rep = find_decomposition(&h.0, &f.0, c.as_ref(), &config(timeout_ms, budget)).map_err(lib)?;
        let (o, cert) = match rep.outcome {
            Outcome::Found(c) => (DlOutcome::Found, Box::into_raw(Box::new(DlCertificate(c)))),
            Outcome::ProvenNone => (DlOutcome::None, ptr::null_mut()),
            Outcome::Timeout => (DlOutcome::Timeout, ptr::null_mut()),
        };
        write(outcome_out, o, "outcome_out")?;
        write(cert_out, cert, "cert_out")
    })
}

/// Counts decompositions; the decimal count is written to `count_out`.
///
/// # Safety
/// Handles must be live; strings NUL-terminated or null; outputs writable.
#[no_mangle]
pub unsafe extern "C" fn dl_count(
    host: *const DlHost,
    family: *const DlFamily,
    pattern_partition_json: *const c_char,
    host_partition_json: *const c_char,
    timeout_ms: u64,
    budget: u64,
    count_out: *mut *mut c_char,
) -> DlStatus {
    guard(|| {
        let (h, f) = (handle(host, "host")?, handle(family, "family")?);
        let c = constraint(pattern_partition_json, host_partition_json)?;
        let n = count_decompositions(&h.0, &f.0, c.as_ref(), &config(timeout_ms, budget)).map_err(lib)?;
        write(count_out, owned_string(n.to_string()), "count_out")
    })
}

/// Recomputes the certificate's footprints against the host.
///
/// # Safety
/// Handles must be live; strings NUL-terminated or null; `valid_out` writable.
#[no_mangle]
pub unsafe extern "C" fn dl_verify(
    host: *const DlHost,
    family: *const DlFamily,
    pattern_partition_json: *const c_char,
    host_partition_json: *const c_char,
    cert: *const DlCertificate,
    valid_out: *mut bool,
) -> DlStatus {
    guard(|| {
        let (h, f, k) = (handle(host, "host")?, handle(family, "family")?, handle(cert, "certificate")?);
        let c = constraint(pattern_partition_json, host_partition_json)?;
        let rep = verify_certificate(&h.0, &f.0, c.as_ref(), &k.0);
        write(valid_out, rep.valid, "valid_out")
    })
}

/// Steiner divisibility: `binom(q-i, r-i) | λ binom(n-i, r-i)` for all `i < r`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dl_steiner_divisible(n: u64, q: u64, r: u64, lambda: u64, out: *mut bool) -> DlStatus {
    guard(|| {
        let rep = steiner_divisible(n, q, r, lambda).map_err(lib)?;
        write(out, rep.verdict, "out")
    })
}
