//! C ABI over `induced_spin`.
//!
//! Every function returns an [`IsStatus`]; results go through out-pointers.
//! On failure the message is kept per thread and can be copied out with
//! [`is_last_error_message`]. Complex 2×2 matrices are passed as 8 doubles,
//! row-major with interleaved real and imaginary parts. Lorentz matrices are
//! 16 doubles, row-major.

use std::cell::RefCell;
use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use induced_spin::fock::{fock_space, FockSpace, ModeBasis};
use induced_spin::many_body::Statistics;
use induced_spin::minkowski::{FourVector, TimelikeUnitVector};
use induced_spin::sl2c::{boost_of, spinor_to_lorentz, wigner_little_group, Mat2, SL2CElement};
use induced_spin::Error;
use nalgebra::DVector;
use num_complex::Complex64;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotTimelike = 3,
    NotUnimodular = 4,
    FoliationMismatch = 5,
    TruncatedSector = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IsStatistics {
    Boson = 0,
    Fermion = 1,
}

/// Opaque truncated Fock space.
pub struct IsFockSpace {
    inner: FockSpace,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(err: &Error) -> IsStatus {
    match err {
        Error::NotTimelikeUnit { .. } | Error::NotForwardTimelike(_) => IsStatus::NotTimelike,
        Error::NotUnimodular { .. } => IsStatus::NotUnimodular,
        Error::FoliationMismatch { .. } => IsStatus::FoliationMismatch,
        Error::TruncatedSector { .. } | Error::NotScalar { .. } => IsStatus::TruncatedSector,
        _ => IsStatus::InvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> Result<(), IsStatus>) -> IsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => IsStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            IsStatus::Panic
        }
    }
}

fn fail(err: Error) -> IsStatus {
    let s = status_of(&err);
    set_error(err.to_string());
    s
}

fn null() -> IsStatus {
    set_error("null pointer argument".into());
    IsStatus::NullPointer
}

unsafe fn read<const N: usize>(p: *const f64) -> Result<[f64; N], IsStatus> {
    if p.is_null() {
        return Err(null());
    }
    let mut out = [0.0; N];
    out.copy_from_slice(std::slice::from_raw_parts(p, N));
    Ok(out)
}

unsafe fn write(p: *mut f64, vals: &[f64]) -> Result<(), IsStatus> {
    if p.is_null() {
        return Err(null());
    }
    std::slice::from_raw_parts_mut(p, vals.len()).copy_from_slice(vals);
    Ok(())
}

fn mat2(v: [f64; 8]) -> Mat2 {
    Mat2::new(
        Complex64::new(v[0], v[1]),
        Complex64::new(v[2], v[3]),
        Complex64::new(v[4], v[5]),
        Complex64::new(v[6], v[7]),
    )
}

fn flat2(m: &Mat2) -> [f64; 8] {
    let mut out = [0.0; 8];
    for r in 0..2 {
        for c in 0..2 {
            out[4 * r + 2 * c] = m[(r, c)].re;
            out[4 * r + 2 * c + 1] = m[(r, c)].im;
        }
    }
    out
}

unsafe fn timelike(p: *const f64) -> Result<TimelikeUnitVector, IsStatus> {
    TimelikeUnitVector::new(FourVector(read::<4>(p)?)).map_err(fail)
}

unsafe fn sl2c(p: *const f64) -> Result<SL2CElement, IsStatus> {
    SL2CElement::new(mat2(read::<8>(p)?)).map_err(fail)
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`) and returns the full message length.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn is_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            std::ptr::copy_nonoverlapping(msg.as_ptr() as *const c_char, buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Lorentz matrix `Λ(A)` of a unimodular `A`.
///
/// # Safety
/// `a` must point to 8 doubles and `out` to 16.
#[no_mangle]
pub unsafe extern "C" fn is_spinor_to_lorentz(a: *const f64, out: *mut f64) -> IsStatus {
    guard(|| {
        let a = sl2c(a)?;
        let m = spinor_to_lorentz(&a);
        let m = m.matrix();
        let flat: Vec<f64> = (0..4).flat_map(|r| (0..4).map(move |c| m[(r, c)])).collect();
        write(out, &flat)
    })
}

/// Canonical boost `L(n)` for a future timelike unit `n`.
///
/// # Safety
/// `n` must point to 4 doubles and `out` to 8.
#[no_mangle]
pub unsafe extern "C" fn is_boost_of(n: *const f64, out: *mut f64) -> IsStatus {
    guard(|| {
        let b = boost_of(&timelike(n)?).map_err(fail)?;
        write(out, &flat2(b.l.matrix()))
    })
}

/// Little-group element `D(A, n)`.
///
/// # Safety
/// `a` must point to 8 doubles, `n` to 4 and `out` to 8.
#[no_mangle]
pub unsafe extern "C" fn is_wigner_little_group(a: *const f64, n: *const f64, out: *mut f64) -> IsStatus {
    guard(|| {
        let d = wigner_little_group(&sl2c(a)?, &timelike(n)?).map_err(fail)?;
        write(out, &flat2(d.matrix()))
    })
}

/// `⟨j1 m1; j2 m2 | j m⟩` in the Condon-Shortley convention.
///
/// # Safety
/// `out` must point to one writable double.
#[no_mangle]
pub unsafe extern "C" fn is_clebsch_gordan(j1: f64, m1: f64, j2: f64, m2: f64, j: f64, m: f64, out: *mut f64) -> IsStatus {
    guard(|| {
        let v = induced_spin::many_body::clebsch_gordan(j1, m1, j2, m2, j, m).map_err(fail)?;
        write(out, &[v])
    })
}

/// Builds a Fock space of `modes` abstract modes on the leaf `n` (rest frame
/// when `n` is null).
///
/// # Safety
/// `n` must be null or point to 4 doubles; `out` must be a valid pointer.
/// The handle is released with [`is_fock_space_free`].
#[no_mangle]
pub unsafe extern "C" fn is_fock_space_new(
    modes: usize,
    n_max: usize,
    statistics: IsStatistics,
    n: *const f64,
    out: *mut *mut IsFockSpace,
) -> IsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let leaf = if n.is_null() { TimelikeUnitVector::rest() } else { timelike(n)? };
        let stats = match statistics {
            IsStatistics::Boson => Statistics::Boson,
            IsStatistics::Fermion => Statistics::Fermion,
        };
        let basis = ModeBasis::new(leaf, modes).map_err(fail)?;
        let inner = fock_space(basis, stats, n_max).map_err(fail)?;
        *out = Box::into_raw(Box::new(IsFockSpace { inner }));
        Ok(())
    })
}

/// # Safety
/// `space` must come from [`is_fock_space_new`]; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn is_fock_space_dim(space: *const IsFockSpace, out: *mut usize) -> IsStatus {
    guard(|| {
        if space.is_null() || out.is_null() {
            return Err(null());
        }
        *out = (*space).inner.dim();
        Ok(())
    })
}

unsafe fn mode_vector(p: *const f64, m: usize) -> Result<DVector<Complex64>, IsStatus> {
    if p.is_null() {
        return Err(null());
    }
    let raw = std::slice::from_raw_parts(p, 2 * m);
    Ok(DVector::from_fn(m, |k, _| Complex64::new(raw[2 * k], raw[2 * k + 1])))
}

/// `[a(φ), a†(ψ)]∓` as a scalar. `phi` and `psi` hold `2·modes` doubles
/// (interleaved real and imaginary parts); `out` receives two.
///
/// # Safety
/// All pointers must be valid for the stated lengths.
#[no_mangle]
pub unsafe extern "C" fn is_fock_space_bracket(
    space: *const IsFockSpace,
    phi: *const f64,
    psi: *const f64,
    out: *mut f64,
) -> IsStatus {
    guard(|| {
        if space.is_null() {
            return Err(null());
        }
        let space = &(*space).inner;
        let m = space.basis().len();
        let phi = space.basis().mode(mode_vector(phi, m)?).map_err(fail)?;
        let psi = space.basis().mode(mode_vector(psi, m)?).map_err(fail)?;
        let c = space.bracket(&phi, &psi).map_err(fail)?;
        write(out, &[c.re, c.im])
    })
}

/// # Safety
/// `space` must be null or come from [`is_fock_space_new`] and not be used
/// afterwards.
#[no_mangle]
pub unsafe extern "C" fn is_fock_space_free(space: *mut IsFockSpace) {
    if !space.is_null() {
        drop(Box::from_raw(space));
    }
}
