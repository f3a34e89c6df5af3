//! C interface to `fixrank`.
//!
//! Fields and lattices cross the boundary as opaque handles, released with
//! `fx_field_free` and `fx_lattice_free`. Every fallible
//! call returns an [`FxStatus`]; on failure the message is available from
//! [`fx_last_error`] on the same thread. Panics are caught and reported as
//! [`FxStatus::Panic`].

use fixrank::counting::{c1_estimate, lhs_count, TestFunction};
use fixrank::hecke::{
    containment_probability, gaussian_binomial, hecke_neighbor, moment_lhs, FiniteSubspace, MomentMode,
};
use fixrank::lattice::{short_vectors, ZLattice};
use fixrank::numfield::{builtin_field, NumberField, PrimeIdealData};
use fixrank::Error;
use num_traits::ToPrimitive;
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FxStatus {
    Ok = 0,
    /// Bad arguments or a failed validation.
    InvalidInput = 1,
    /// An enumeration would exceed its cap.
    CapExceeded = 2,
    Io = 3,
    NullPointer = 4,
    /// A result does not fit the output type.
    Overflow = 5,
    Panic = 6,
    Internal = 7,
}

/// A number field.
pub struct FxField {
    inner: Arc<NumberField>,
}

/// A lattice in `O_K^n`.
pub struct FxLattice {
    inner: ZLattice,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> FxStatus {
    match e {
        Error::CapExceeded { .. } => FxStatus::CapExceeded,
        Error::Io(_) => FxStatus::Io,
        Error::Overflow(_) => FxStatus::Overflow,
        Error::Json(_) => FxStatus::Internal,
        _ => FxStatus::InvalidInput,
    }
}

enum Fail {
    Lib(Error),
    Null,
    Overflow(&'static str),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn guard<F: FnOnce() -> Result<(), Fail>>(f: F) -> FxStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            FxStatus::Ok
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Ok(Err(Fail::Null)) => {
            set_error("null pointer argument");
            FxStatus::NullPointer
        }
        Ok(Err(Fail::Overflow(what))) => {
            set_error(&format!("{what} does not fit the output type"));
            FxStatus::Overflow
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(&format!("panic: {msg}"));
            FxStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null)
}

unsafe fn out<'a, T>(p: *mut T) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or(Fail::Null)
}

fn ball(radius: f64) -> Result<TestFunction, Fail> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::InvalidInput(format!("radius must be positive, got {radius}")).into());
    }
    Ok(TestFunction::ball(radius))
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn fx_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fx_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Builtin field by name (`Q`, `Qi`, `Qsqrt2`, `Qsqrt5`, `Qzeta3`).
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fx_field_builtin(name: *const c_char, out_field: *mut *mut FxField) -> FxStatus {
    guard(|| {
        let name = CStr::from_ptr(deref(name)?).to_string_lossy();
        let f = builtin_field(&name)?;
        *out(out_field)? = Box::into_raw(Box::new(FxField { inner: f }));
        Ok(())
    })
}

/// Field of a monic irreducible polynomial, coefficients constant term first,
/// with the power basis as integral basis.
///
/// # Safety
/// `coeffs` must point to `len` integers and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fx_field_from_poly(coeffs: *const i64, len: usize, out_field: *mut *mut FxField) -> FxStatus {
    guard(|| {
        if coeffs.is_null() {
            return Err(Fail::Null);
        }
        let c = std::slice::from_raw_parts(coeffs, len);
        let f = NumberField::new(c, None)?;
        *out(out_field)? = Box::into_raw(Box::new(FxField { inner: f }));
        Ok(())
    })
}

/// # Safety
/// `field` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fx_field_free(field: *mut FxField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// # Safety
/// `field` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fx_field_degree(field: *const FxField, out_degree: *mut usize) -> FxStatus {
    guard(|| {
        *out(out_degree)? = deref(field)?.inner.degree();
        Ok(())
    })
}

/// # Safety
/// `field` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fx_field_discriminant(field: *const FxField, out_disc: *mut i64) -> FxStatus {
    guard(|| {
        let d = deref(field)?.inner.discriminant().to_i64().ok_or(Fail::Overflow("discriminant"))?;
        *out(out_disc)? = d;
        Ok(())
    })
}

/// `O_K^r` with unit covolume.
///
/// # Safety
/// `field` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fx_lattice_ok_power(field: *const FxField, r: usize, out_lattice: *mut *mut FxLattice) -> FxStatus {
    guard(|| {
        let f = deref(field)?.inner.clone();
        if r == 0 {
            return Err(Error::InvalidInput("rank must be positive".into()).into());
        }
        let l = ZLattice::ok_power(&f, r);
        *out(out_lattice)? = Box::into_raw(Box::new(FxLattice { inner: l }));
        Ok(())
    })
}

/// Hecke neighbor of `O_K^n` for the first degree-one prime above `p` and
/// the subspace of `F_p^n` spanned by the `s` rows of `rows` (row-major).
///
/// # Safety
/// `rows` must point to `s * n` values; `field` must be live; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn fx_lattice_hecke_neighbor(
    field: *const FxField,
    p: u64,
    n: usize,
    rows: *const u64,
    s: usize,
    out_lattice: *mut *mut FxLattice,
) -> FxStatus {
    guard(|| {
        let f = deref(field)?.inner.clone();
        let prime = PrimeIdealData::first_above(&f, p)?;
        let data: &[u64] = if s == 0 {
            &[]
        } else {
            if rows.is_null() {
                return Err(Fail::Null);
            }
            std::slice::from_raw_parts(rows, s * n)
        };
        let rows: Vec<Vec<u64>> = data.chunks(n.max(1)).map(|c| c.to_vec()).collect();
        let sub = FiniteSubspace::new(p, n, &rows)?;
        let h = hecke_neighbor(&f, &prime, &sub)?;
        *out(out_lattice)? = Box::into_raw(Box::new(FxLattice { inner: h.lattice }));
        Ok(())
    })
}

/// # Safety
/// `lattice` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fx_lattice_free(lattice: *mut FxLattice) {
    if !lattice.is_null() {
        drop(Box::from_raw(lattice));
    }
}

/// # Safety
/// `lattice` must be live; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn fx_lattice_rank(lattice: *const FxLattice, out_rank: *mut usize) -> FxStatus {
    guard(|| {
        *out(out_rank)? = deref(lattice)?.inner.rank();
        Ok(())
    })
}

/// Covolume of the lattice in its real span.
///
/// # Safety
/// `lattice` must be live; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn fx_lattice_covolume(lattice: *const FxLattice, out_covolume: *mut f64) -> FxStatus {
    guard(|| {
        *out(out_covolume)? = deref(lattice)?.inner.height();
        Ok(())
    })
}

/// Number of lattice vectors of norm at most `radius`, zero included.
///
/// # Safety
/// `lattice` must be live; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn fx_lattice_count_within(lattice: *const FxLattice, radius: f64, out_count: *mut u64) -> FxStatus {
    guard(|| {
        *out(out_count)? = short_vectors(&deref(lattice)?.inner, radius)?.len() as u64;
        Ok(())
    })
}

/// Number of rank-`k` matrices `A ∈ M_{n×m}(O_K)` with `|A| <= t * radius`.
///
/// # Safety
/// `field` must be live; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn fx_count_rank(
    field: *const FxField,
    n: usize,
    m: usize,
    k: usize,
    t: f64,
    radius: f64,
    out_count: *mut u64,
) -> FxStatus {
    guard(|| {
        let f = deref(field)?.inner.clone();
        let rep = lhs_count(&f, n, m, k, t, &ball(radius)?)?;
        *out(out_count)? = rep.exact_count.unwrap_or(0);
        Ok(())
    })
}

/// Truncated leading-constant series for the ball of `radius`.
///
/// # Safety
/// `field` must be live; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn fx_c1_estimate(
    field: *const FxField,
    n: usize,
    m: usize,
    k: usize,
    radius: f64,
    cutoff: f64,
    mc_samples: usize,
    seed: u64,
    out_value: *mut f64,
) -> FxStatus {
    guard(|| {
        let f = deref(field)?.inner.clone();
        let est = c1_estimate(&f, n, m, k, &ball(radius)?, cutoff, mc_samples, seed)?;
        *out(out_value)? = est.partial_sum;
        Ok(())
    })
}

/// Number of `u`-dimensional subspaces of `F_q^t`.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn fx_gaussian_binomial(u: usize, t: usize, q: u64, out_count: *mut u64) -> FxStatus {
    guard(|| {
        let v = gaussian_binomial(u, t, q).to_u64().ok_or(Fail::Overflow("Gaussian binomial"))?;
        *out(out_count)? = v;
        Ok(())
    })
}

/// Probability that a uniform `s`-subspace of `F_q^n` contains a fixed
/// `k`-subspace, as a reduced fraction.
///
/// # Safety
/// `num` and `den` must be valid.
#[no_mangle]
pub unsafe extern "C" fn fx_containment_probability(
    k: usize,
    s: usize,
    n: usize,
    q: u64,
    num: *mut u64,
    den: *mut u64,
) -> FxStatus {
    guard(|| {
        let r = containment_probability(k, s, n, q);
        let a = r.numer().to_u64().ok_or(Fail::Overflow("numerator"))?;
        let b = r.denom().to_u64().ok_or(Fail::Overflow("denominator"))?;
        *out(num)? = a;
        *out(den)? = b;
        Ok(())
    })
}

/// Average of `(sum_{v ∈ Λ} 1[|v| <= radius])^m` over the `(P, s)`-neighbors
/// of `O_K^n`; all of them when `samples == 0`, else `samples` uniform draws.
///
/// # Safety
/// `field` must be live; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn fx_moment(
    field: *const FxField,
    p: u64,
    n: usize,
    s: usize,
    m: usize,
    radius: f64,
    include_zero: bool,
    samples: usize,
    seed: u64,
    out_value: *mut f64,
) -> FxStatus {
    guard(|| {
        let f = deref(field)?.inner.clone();
        let prime = PrimeIdealData::first_above(&f, p)?;
        let mode = if samples == 0 {
            MomentMode::Exact
        } else {
            MomentMode::Sampled { count: samples }
        };
        let v = moment_lhs(&f, &prime, n, s, m, &ball(radius)?, mode, seed, include_zero)?;
        *out(out_value)? = v.value;
        Ok(())
    })
}
