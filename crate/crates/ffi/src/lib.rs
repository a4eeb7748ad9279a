//! C ABI over `sublattice-core`.
//!
//! Every function returns an [`SlStatus`] and writes results through out
//! pointers. Lattices are opaque [`SlLattice`] handles released with
//! [`sl_lattice_free`]. On failure, [`sl_last_error_message`] describes the
//! error on the calling thread. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use sublattice_core::{
    enumeration, stirling2, EnumerationError, Lattice, LatticeError, LinalgError, SearchConfig,
    Status,
};

/// Result code of every `sl_*` call.
#[repr(i32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotMultiplicative = 3,
    Overflow = 4,
    BudgetExhausted = 5,
    Internal = 6,
    Panic = 7,
}

/// Opaque lattice handle.
pub struct SlLattice {
    inner: Lattice,
}

/// Outcome of [`sl_verify_main_theorem`].
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SlReport {
    pub n: usize,
    pub k: usize,
    pub r: u64,
    pub oracle_count: u64,
    pub formula_count: u64,
    pub stirling_factor: u64,
    pub phi_base: u64,
    pub witnesses_checked: usize,
    pub passed: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(SlStatus, String);

type Outcome = Result<(), Failure>;

fn fail<T>(status: SlStatus, msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure(status, msg.into()))
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Outcome) -> SlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            SlStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(&format!("panic: {msg}"));
            SlStatus::Panic
        }
    }
}

fn linalg_status(e: &LinalgError) -> SlStatus {
    match e {
        LinalgError::Overflow => SlStatus::Overflow,
        _ => SlStatus::InvalidArgument,
    }
}

fn lattice_status(e: &LatticeError) -> SlStatus {
    match e {
        LatticeError::Linalg(l) => linalg_status(l),
        LatticeError::NotMultiplicative => SlStatus::NotMultiplicative,
        LatticeError::DimensionMismatch { .. } | LatticeError::BadPermutation(_) => {
            SlStatus::InvalidArgument
        }
    }
}

impl From<LatticeError> for Failure {
    fn from(e: LatticeError) -> Self {
        Failure(lattice_status(&e), e.to_string())
    }
}

impl From<EnumerationError> for Failure {
    fn from(e: EnumerationError) -> Self {
        let status = match &e {
            EnumerationError::BudgetExhausted(_) => SlStatus::BudgetExhausted,
            EnumerationError::InvalidParameters(_) => SlStatus::InvalidArgument,
            EnumerationError::Lattice(l) => lattice_status(l),
            EnumerationError::Partition(_) => SlStatus::InvalidArgument,
            EnumerationError::Inconsistent(_) | EnumerationError::ThreadPool(_) => {
                SlStatus::Internal
            }
        };
        Failure(status, e.to_string())
    }
}

fn narrow(v: u128) -> Result<u64, Failure> {
    u64::try_from(v).or_else(|_| fail(SlStatus::Overflow, format!("{v} does not fit in 64 bits")))
}

fn config(jobs: usize, max_steps: u64) -> SearchConfig {
    let mut cfg = SearchConfig::default();
    if jobs > 0 {
        cfg.jobs = jobs;
    }
    if max_steps > 0 {
        cfg.max_steps = max_steps;
    }
    cfg
}

unsafe fn put<T>(out: *mut T, v: T) -> Outcome {
    if out.is_null() {
        return fail(SlStatus::NullPointer, "null output pointer");
    }
    out.write(v);
    Ok(())
}

unsafe fn handle<'a>(l: *const SlLattice) -> Result<&'a Lattice, Failure> {
    match l.as_ref() {
        Some(h) => Ok(&h.inner),
        None => fail(SlStatus::NullPointer, "null lattice handle"),
    }
}

/// NUL-terminated engine version string with static lifetime.
#[no_mangle]
pub extern "C" fn sl_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(
        concat!("sublattice-", env!("CARGO_PKG_VERSION"), "\0").as_bytes(),
    ) {
        Ok(s) => s,
        Err(_) => panic!("version string"),
    };
    VERSION.as_ptr()
}

/// Message for the last failed call on this thread; empty after success.
///
/// The pointer stays valid until the next `sl_*` call on the same thread.
#[no_mangle]
pub extern "C" fn sl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Builds the lattice spanned by `rows` row vectors of length `ambient`,
/// stored row-major in `entries`. `entries` may be null when `rows` is 0.
///
/// # Safety
/// `entries` must point to `rows * ambient` readable values and `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn sl_lattice_new(
    ambient: usize,
    rows: usize,
    entries: *const i64,
    out: *mut *mut SlLattice,
) -> SlStatus {
    guard(|| {
        if out.is_null() {
            return fail(SlStatus::NullPointer, "null output pointer");
        }
        out.write(ptr::null_mut());
        let Some(len) = rows.checked_mul(ambient) else {
            return fail(SlStatus::InvalidArgument, "rows * ambient overflows");
        };
        let data: &[i64] = if len == 0 {
            &[]
        } else if entries.is_null() {
            return fail(SlStatus::NullPointer, "null entries");
        } else {
            std::slice::from_raw_parts(entries, len)
        };
        let row_vecs: Vec<&[i64]> = if ambient == 0 {
            Vec::new()
        } else {
            data.chunks(ambient).collect()
        };
        let inner = Lattice::from_rows(ambient, &row_vecs)?;
        out.write(Box::into_raw(Box::new(SlLattice { inner })));
        Ok(())
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `l` must come from [`sl_lattice_new`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn sl_lattice_free(l: *mut SlLattice) {
    if !l.is_null() {
        let _ = catch_unwind(AssertUnwindSafe(|| drop(Box::from_raw(l))));
    }
}

/// # Safety
/// `l` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sl_lattice_rank(l: *const SlLattice, out: *mut usize) -> SlStatus {
    guard(|| put(out, handle(l)?.rank()))
}

/// # Safety
/// `l` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sl_lattice_ambient(l: *const SlLattice, out: *mut usize) -> SlStatus {
    guard(|| put(out, handle(l)?.ambient_dim()))
}

/// Copies the canonical Hermite basis, row-major, into `buf`.
///
/// `*needed` receives `rank * ambient`. If `capacity` is smaller, nothing is
/// copied and `SL_STATUS_INVALID_ARGUMENT` is returned; `buf` may then be null.
///
/// # Safety
/// `buf` must hold `capacity` writable values; `needed` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_lattice_basis(
    l: *const SlLattice,
    buf: *mut i64,
    capacity: usize,
    needed: *mut usize,
) -> SlStatus {
    guard(|| {
        let lat = handle(l)?;
        let n = lat.rank() * lat.ambient_dim();
        put(needed, n)?;
        if capacity < n {
            return fail(
                SlStatus::InvalidArgument,
                format!("buffer holds {capacity}, need {n}"),
            );
        }
        if n == 0 {
            return Ok(());
        }
        if buf.is_null() {
            return fail(SlStatus::NullPointer, "null buffer");
        }
        let dst = std::slice::from_raw_parts_mut(buf, n);
        for (chunk, row) in dst
            .chunks_mut(lat.ambient_dim())
            .zip(lat.basis().row_iter())
        {
            chunk.copy_from_slice(row);
        }
        Ok(())
    })
}

/// # Safety
/// `l` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sl_lattice_is_multiplicative(
    l: *const SlLattice,
    out: *mut bool,
) -> SlStatus {
    guard(|| put(out, handle(l)?.is_multiplicative()?))
}

/// Size of the torsion subgroup of `Z^ambient / L`.
///
/// # Safety
/// `l` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sl_lattice_torsion_size(l: *const SlLattice, out: *mut u64) -> SlStatus {
    guard(|| put(out, handle(l)?.torsion_size()?))
}

/// # Safety
/// `l` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sl_lattice_distinct_nonzero_columns(
    l: *const SlLattice,
    out: *mut usize,
) -> SlStatus {
    guard(|| put(out, handle(l)?.distinct_nonzero_columns()))
}

/// Whether the number of distinct nonzero basis columns equals the rank.
///
/// # Safety
/// `l` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sl_lattice_rigidity_check(
    l: *const SlLattice,
    out: *mut bool,
) -> SlStatus {
    guard(|| put(out, handle(l)?.rigidity_check()?))
}

/// Equality of row spans.
///
/// # Safety
/// `a` and `b` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sl_lattice_equal(
    a: *const SlLattice,
    b: *const SlLattice,
    out: *mut bool,
) -> SlStatus {
    guard(|| put(out, handle(a)? == handle(b)?))
}

/// Stirling number of the second kind `S(u, v)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_stirling2(u: usize, v: usize, out: *mut u64) -> SlStatus {
    guard(|| {
        let s = catch_unwind(|| stirling2(u, v))
            .or_else(|_| fail(SlStatus::Overflow, format!("S({u}, {v}) overflows")))?;
        put(out, narrow(s)?)
    })
}

/// `φ_n(r)`. `jobs == 0` uses every core; `max_steps == 0` the default budget.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_phi(
    n: usize,
    r: u64,
    jobs: usize,
    max_steps: u64,
    out: *mut u64,
) -> SlStatus {
    guard(|| put(out, enumeration::phi(n, r, &config(jobs, max_steps))?))
}

/// `f_n(r)`, for `n >= 1`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_f_count(
    n: usize,
    r: u64,
    jobs: usize,
    max_steps: u64,
    out: *mut u64,
) -> SlStatus {
    guard(|| put(out, enumeration::f_count(n, r, &config(jobs, max_steps))?))
}

/// `S(n+k+1, n+1) · φ_n(r)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_phi_corank_formula(
    n: usize,
    k: usize,
    r: u64,
    jobs: usize,
    max_steps: u64,
    out: *mut u64,
) -> SlStatus {
    guard(|| {
        let v = enumeration::phi_corank_formula(n, k, r, &config(jobs, max_steps))?;
        put(out, narrow(v)?)
    })
}

/// Brute-force count of co-rank `corank` multiplicative sublattices of
/// `Z^ambient` with torsion size `r`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_corank_oracle_count(
    ambient: usize,
    corank: usize,
    r: u64,
    bound_multiplier: u64,
    jobs: usize,
    max_steps: u64,
    out: *mut u64,
) -> SlStatus {
    guard(|| {
        let v = enumeration::enumerate_corank_oracle(
            ambient,
            corank,
            r,
            bound_multiplier,
            &config(jobs, max_steps),
        )?;
        put(out, v.len() as u64)
    })
}

/// Compares oracle and formula for one `(n, k, r)` cell.
///
/// A failed comparison is still `SL_STATUS_OK`; check `passed`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_verify_main_theorem(
    n: usize,
    k: usize,
    r: u64,
    bound_multiplier: u64,
    jobs: usize,
    max_steps: u64,
    out: *mut SlReport,
) -> SlStatus {
    guard(|| {
        let rep =
            enumeration::verify_main_theorem(n, k, r, bound_multiplier, &config(jobs, max_steps))?;
        put(
            out,
            SlReport {
                n: rep.n,
                k: rep.k,
                r: rep.r,
                oracle_count: narrow(rep.oracle_count)?,
                formula_count: narrow(rep.formula_count)?,
                stirling_factor: narrow(rep.stirling_factor)?,
                phi_base: rep.phi_base,
                witnesses_checked: rep.witnesses_checked,
                passed: rep.status == Status::Pass,
            },
        )
    })
}
