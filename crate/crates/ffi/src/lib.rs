//! C ABI for `domain-rdm`.
//!
//! Objects are opaque heap handles released with the matching `*_free`.
//! Every fallible call returns a [`DrStatus`]; on failure the message is
//! available from [`dr_last_error`] on the same thread. Matrices cross the
//! boundary as dense row-major `double` arrays.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use libc::{c_char, c_int, size_t};

use domain_rdm::dafh::dafh_matrix;
use domain_rdm::decomposition::symmetric_restrict;
use domain_rdm::nalgebra::DMatrix;
use domain_rdm::oracle::{hubbard_fci, parse_site_blocks, site_domains, Boundary, HubbardSpec};
use domain_rdm::rdm::{validate_domain_set, validate_one_rdm, validate_two_rdm};
use domain_rdm::representability::{check, FindingCode};
use domain_rdm::{DomainOverlapSet, Error, OneRdm, TwoRdm};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Validation = 3,
    NotRepresentable = 4,
    NegativeOccupation = 5,
    TooLarge = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

/// Validated spin-free 1-RDM.
pub struct DrOneRdm(OneRdm);
/// Validated 2-RDM, flattened in `(i,k,j,l)` order.
pub struct DrTwoRdm(TwoRdm);
/// Validated domain overlap matrices.
pub struct DrDomainSet(DomainOverlapSet);

/// Representability summary. Finding magnitudes are 0 when absent.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct DrReport {
    /// 1 if representable.
    pub representable: c_int,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    pub trace: f64,
    pub hermiticity_deviation: f64,
    pub negative_eigenvalue: f64,
    pub pauli_violation: f64,
    pub trace_mismatch: f64,
    pub non_hermitian: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> DrStatus {
    match e {
        Error::NotRepresentable { .. } => DrStatus::NotRepresentable,
        Error::NegativeOccupation { .. } => DrStatus::NegativeOccupation,
        Error::TooLarge { .. } => DrStatus::TooLarge,
        Error::InvalidSpec(_) | Error::InvalidPartition(_) | Error::UnknownDomain(_) => DrStatus::InvalidArgument,
        _ => DrStatus::Validation,
    }
}

struct Fail(DrStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null() -> Fail {
    Fail(DrStatus::NullPointer, "null pointer argument".into())
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> DrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            DrStatus::Ok
        }
        Ok(Err(Fail(s, msg))) => {
            set_error(&msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            DrStatus::Panic
        }
    }
}

unsafe fn slice<'a>(p: *const f64, len: usize) -> Result<&'a [f64], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null());
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(null)
}

fn check_len(m: usize, len: usize) -> Result<usize, Fail> {
    let need = m
        .checked_mul(m)
        .ok_or_else(|| Fail(DrStatus::InvalidArgument, "dimension overflow".into()))?;
    if len < need {
        return Err(Fail(
            DrStatus::BufferTooSmall,
            format!("buffer holds {len} values, need {need}"),
        ));
    }
    Ok(need)
}

unsafe fn put<T>(out: *mut *mut T, v: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null());
    }
    *out = Box::into_raw(Box::new(v));
    Ok(())
}

unsafe fn write_matrix(m: &DMatrix<f64>, out: *mut f64, out_len: usize) -> Result<(), Fail> {
    check_len(m.nrows(), out_len)?;
    if out.is_null() {
        return Err(null());
    }
    let dst = std::slice::from_raw_parts_mut(out, m.nrows() * m.ncols());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            dst[i * m.ncols() + j] = m[(i, j)];
        }
    }
    Ok(())
}

/// Message of the last failed call on this thread (empty after success).
/// Valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn dr_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[no_mangle]
pub extern "C" fn dr_version() -> *const c_char {
    static V: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => panic!(),
    };
    V.as_ptr()
}

/// Validates an `m × m` row-major 1-RDM for `n_electrons` electrons.
///
/// # Safety
/// `data` must point to `m*m` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dr_one_rdm_new(data: *const f64, m: size_t, n_electrons: size_t, out: *mut *mut DrOneRdm) -> DrStatus {
    guard(|| {
        let need = check_len(m, usize::MAX)?;
        let d = slice(data, need)?;
        let rdm = validate_one_rdm(DMatrix::from_row_slice(m, m, d), n_electrons)?;
        put(out, DrOneRdm(rdm))
    })
}

/// # Safety
/// `p` must be null or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn dr_one_rdm_free(p: *mut DrOneRdm) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// # Safety
/// `p` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn dr_one_rdm_dim(p: *const DrOneRdm) -> size_t {
    p.as_ref().map_or(0, |d| d.0.dim())
}

/// Copies the 1-RDM into `out` (row-major, `m*m`).
///
/// # Safety
/// `p` must be a valid handle; `out` must hold `out_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn dr_one_rdm_matrix(p: *const DrOneRdm, out: *mut f64, out_len: size_t) -> DrStatus {
    guard(|| write_matrix(handle(p)?.0.matrix().as_matrix(), out, out_len))
}

/// Validates an `m⁴` 2-RDM against `one`.
///
/// # Safety
/// `data` must point to `len` doubles; `one` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn dr_two_rdm_new(
    data: *const f64,
    len: size_t,
    one: *const DrOneRdm,
    out: *mut *mut DrTwoRdm,
) -> DrStatus {
    guard(|| {
        let one = handle(one)?;
        let d = slice(data, len)?;
        put(out, DrTwoRdm(validate_two_rdm(d.to_vec(), &one.0)?))
    })
}

/// # Safety
/// `p` must be null or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn dr_two_rdm_free(p: *mut DrTwoRdm) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Exact ground state of a Hubbard chain. Either output handle may be null.
///
/// # Safety
/// Non-null pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn dr_hubbard_fci(
    n_sites: size_t,
    n_electrons: size_t,
    t: f64,
    u: f64,
    periodic: c_int,
    energy: *mut f64,
    out_one: *mut *mut DrOneRdm,
    out_two: *mut *mut DrTwoRdm,
) -> DrStatus {
    guard(|| {
        let spec = HubbardSpec {
            n_sites,
            n_electrons,
            hopping: t,
            interaction: u,
            boundary: if periodic != 0 { Boundary::Periodic } else { Boundary::Open },
        };
        let r = hubbard_fci(&spec)?;
        if !energy.is_null() {
            *energy = r.ground_energy;
        }
        if !out_one.is_null() {
            put(out_one, DrOneRdm(r.one_rdm))?;
        }
        if !out_two.is_null() {
            put(out_two, DrTwoRdm(r.two_rdm))?;
        }
        Ok(())
    })
}

/// Builds a domain set from `count` row-major `m × m` overlap matrices
/// stored back to back. Domains are labelled "1".."count".
///
/// # Safety
/// `data` must point to `count*m*m` doubles.
#[no_mangle]
pub unsafe extern "C" fn dr_domain_set_new(data: *const f64, count: size_t, m: size_t, out: *mut *mut DrDomainSet) -> DrStatus {
    guard(|| {
        let mm = check_len(m, usize::MAX)?;
        let total = mm
            .checked_mul(count)
            .ok_or_else(|| Fail(DrStatus::InvalidArgument, "size overflow".into()))?;
        let d = slice(data, total)?;
        let mats = d
            .chunks(mm.max(1))
            .take(count)
            .map(|c| DMatrix::from_row_slice(m, m, c))
            .collect();
        let labels = (1..=count).map(|i| i.to_string()).collect();
        put(out, DrDomainSet(validate_domain_set(mats, labels)?))
    })
}

/// Site-block domains from a spec such as "1,2;3,4" (1-based).
///
/// # Safety
/// `blocks` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn dr_site_domains(n_sites: size_t, blocks: *const c_char, out: *mut *mut DrDomainSet) -> DrStatus {
    guard(|| {
        if blocks.is_null() {
            return Err(null());
        }
        let s = CStr::from_ptr(blocks)
            .to_str()
            .map_err(|_| Fail(DrStatus::InvalidArgument, "block spec is not UTF-8".into()))?;
        put(out, DrDomainSet(site_domains(n_sites, &parse_site_blocks(s)?)?))
    })
}

/// # Safety
/// `p` must be null or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn dr_domain_set_free(p: *mut DrDomainSet) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// # Safety
/// `p` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn dr_domain_set_len(p: *const DrDomainSet) -> size_t {
    p.as_ref().map_or(0, |d| d.0.len())
}

unsafe fn domain<'a>(set: *const DrDomainSet, index: usize) -> Result<(&'a str, &'a domain_rdm::SymMatrix), Fail> {
    let set = &handle(set)?.0;
    if index >= set.len() {
        return Err(Fail(
            DrStatus::InvalidArgument,
            format!("domain index {index} out of range 0..{}", set.len()),
        ));
    }
    Ok((&set.labels()[index], &set.matrices()[index]))
}

/// Symmetric restriction `D^{1/2} S D^{1/2}` of domain `index`, written
/// row-major into `out`.
///
/// # Safety
/// Handles must be valid; `out` must hold `out_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn dr_symmetric_restrict(
    one: *const DrOneRdm,
    set: *const DrDomainSet,
    index: size_t,
    out: *mut f64,
    out_len: size_t,
) -> DrStatus {
    guard(|| {
        let (label, s) = domain(set, index)?;
        let g = symmetric_restrict(&handle(one)?.0, s, label)?;
        write_matrix(g.matrix.as_matrix(), out, out_len)
    })
}

/// Domain-averaged hole matrix of domain `index`, written row-major.
///
/// # Safety
/// Handles must be valid; `out` must hold `out_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn dr_dafh(
    one: *const DrOneRdm,
    two: *const DrTwoRdm,
    set: *const DrDomainSet,
    index: size_t,
    out: *mut f64,
    out_len: size_t,
) -> DrStatus {
    guard(|| {
        let (label, s) = domain(set, index)?;
        let g = dafh_matrix(&handle(one)?.0, &handle(two)?.0, s, label)?;
        write_matrix(g.matrix.as_matrix(), out, out_len)
    })
}

/// Checks an `m × m` row-major matrix. Pass NaN as `expected_trace` to
/// skip the trace test. Returns `DR_STATUS_NOT_REPRESENTABLE` (with the
/// report filled in) when any finding is raised.
///
/// # Safety
/// `data` must point to `m*m` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dr_check(data: *const f64, m: size_t, expected_trace: f64, tol: f64, out: *mut DrReport) -> DrStatus {
    let mut verdict = DrStatus::Ok;
    let status = guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let need = check_len(m, usize::MAX)?;
        let d = slice(data, need)?;
        let expected = (!expected_trace.is_nan()).then_some(expected_trace);
        let r = check(&DMatrix::from_row_slice(m, m, d), expected, tol);
        let mag = |c| r.finding(c).map_or(0.0, |f| f.magnitude);
        *out = DrReport {
            representable: r.is_representable() as c_int,
            min_eigenvalue: r.min_eigenvalue,
            max_eigenvalue: r.max_eigenvalue,
            trace: r.trace,
            hermiticity_deviation: r.hermiticity_deviation,
            negative_eigenvalue: mag(FindingCode::NegativeEigenvalue),
            pauli_violation: mag(FindingCode::PauliViolation),
            trace_mismatch: mag(FindingCode::TraceMismatch),
            non_hermitian: mag(FindingCode::NonHermitian),
        };
        if !r.is_representable() {
            verdict = DrStatus::NotRepresentable;
        }
        Ok(())
    });
    if status == DrStatus::Ok {
        verdict
    } else {
        status
    }
}
