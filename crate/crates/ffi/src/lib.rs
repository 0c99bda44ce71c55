//! C ABI over the solver. Every call returns an `RtStatus`; on failure the
//! message is kept per thread and read back with `rt_last_error_message`.
//! Handles are opaque and owned by the caller until passed to their `_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use redfield_teleport::dynamics::{self, Liouvillian, ReservoirSpec, Statistics};
use redfield_teleport::entanglement;
use redfield_teleport::error::Error;
use redfield_teleport::linalg::{Mat4, C64};
use redfield_teleport::model::SystemParams;
use redfield_teleport::state::{Basis, DensityMatrix4, DEFAULT_POSITIVITY_TOL};
use redfield_teleport::teleport::{self, InputState, Protocol};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    PhaseBoundary = 3,
    NonPositiveTransitionFrequency = 4,
    DivergentOccupation = 5,
    DegenerateSteadyState = 6,
    PositivityViolation = 7,
    InvalidState = 8,
    PhaseDomain = 9,
    NotXForm = 10,
    SpectrumError = 11,
    DomainError = 12,
    NoBracket = 13,
    SchemaError = 14,
    SemanticError = 15,
    IoError = 16,
    Panic = 17,
}

impl From<&Error> for RtStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidParameter { .. } => RtStatus::InvalidParameter,
            Error::PhaseBoundary { .. } => RtStatus::PhaseBoundary,
            Error::NonPositiveTransitionFrequency(_) => RtStatus::NonPositiveTransitionFrequency,
            Error::DivergentOccupation(_) => RtStatus::DivergentOccupation,
            Error::DegenerateSteadyState { .. } => RtStatus::DegenerateSteadyState,
            Error::PositivityViolation { .. } => RtStatus::PositivityViolation,
            Error::InvalidState(_) => RtStatus::InvalidState,
            Error::PhaseDomain { .. } => RtStatus::PhaseDomain,
            Error::NotXForm { .. } => RtStatus::NotXForm,
            Error::SpectrumError(_) => RtStatus::SpectrumError,
            Error::DomainError(_) => RtStatus::DomainError,
            Error::NoBracket => RtStatus::NoBracket,
            Error::Schema { .. } => RtStatus::SchemaError,
            Error::Semantic(_) => RtStatus::SemanticError,
            Error::Io(_) => RtStatus::IoError,
        }
    }
}

/// 0 = bosonic, 1 = fermionic.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct RtReservoir {
    pub statistics: i32,
    pub temperature: f64,
    pub mu: f64,
    pub gamma: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct RtSystem {
    pub epsilon_a: f64,
    pub epsilon_b: f64,
    pub lambda: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RtComplex {
    pub re: f64,
    pub im: f64,
}

pub struct RtLiouvillian {
    inner: Liouvillian,
}

/// Density matrix of the pair in the local basis.
pub struct RtState {
    inner: DensityMatrix4,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

enum Failure {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> RtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            RtStatus::Ok
        }
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            RtStatus::NullPointer
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            RtStatus::from(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            RtStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn write<T>(p: *mut T, what: &'static str, v: T) -> Result<(), Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    p.write(v);
    Ok(())
}

fn reservoir(r: &RtReservoir) -> Result<ReservoirSpec, Error> {
    let statistics = match r.statistics {
        0 => Statistics::Bosonic,
        1 => Statistics::Fermionic,
        other => {
            return Err(Error::InvalidParameter {
                name: "statistics",
                reason: format!("expected 0 (bosonic) or 1 (fermionic), got {other}"),
            })
        }
    };
    ReservoirSpec::new(statistics, r.temperature, r.mu, r.gamma)
}

fn state_handle(inner: DensityMatrix4) -> *mut RtState {
    Box::into_raw(Box::new(RtState { inner }))
}

/// Copies the last error of this thread into `buf` (NUL terminated, truncated
/// to `len`) and returns the full message length without the NUL.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn rt_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let bytes = e.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Static NUL-terminated version string.
#[no_mangle]
pub extern "C" fn rt_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// Pointers must be valid; `out` receives a handle to free with `rt_liouvillian_free`.
#[no_mangle]
pub unsafe extern "C" fn rt_liouvillian_new(
    system: *const RtSystem,
    reservoir_a: *const RtReservoir,
    reservoir_b: *const RtReservoir,
    out: *mut *mut RtLiouvillian,
) -> RtStatus {
    guard(|| {
        let s = deref(system, "system")?;
        let ra = reservoir(deref(reservoir_a, "reservoir_a")?)?;
        let rb = reservoir(deref(reservoir_b, "reservoir_b")?)?;
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let params = SystemParams::new(s.epsilon_a, s.epsilon_b, s.lambda)?;
        let inner = dynamics::build_liouvillian(&params, &ra, &rb)?;
        write(out, "out", Box::into_raw(Box::new(RtLiouvillian { inner })))
    })
}

/// # Safety
/// `l` must be null or a handle from `rt_liouvillian_new` not freed before.
#[no_mangle]
pub unsafe extern "C" fn rt_liouvillian_free(l: *mut RtLiouvillian) {
    if !l.is_null() {
        drop(Box::from_raw(l));
    }
}

/// Unique steady state. A negative `positivity_tol` selects the default.
///
/// # Safety
/// `l` must be a live handle; `out` receives a state handle.
#[no_mangle]
pub unsafe extern "C" fn rt_steady_state(l: *const RtLiouvillian, positivity_tol: f64, out: *mut *mut RtState) -> RtStatus {
    guard(|| {
        let l = &deref(l, "liouvillian")?.inner;
        let tol = if positivity_tol < 0.0 { DEFAULT_POSITIVITY_TOL } else { positivity_tol };
        let ss = dynamics::steady_state(l, tol)?;
        write(out, "out", state_handle(ss.rho.to_basis(Basis::Local, &l.eigen)))
    })
}

/// State after time `t` under the generator `l`.
///
/// # Safety
/// `l` and `rho` must be live handles; `out` receives a new state handle.
#[no_mangle]
pub unsafe extern "C" fn rt_propagate(
    l: *const RtLiouvillian,
    rho: *const RtState,
    t: f64,
    positivity_tol: f64,
    out: *mut *mut RtState,
) -> RtStatus {
    guard(|| {
        let l = &deref(l, "liouvillian")?.inner;
        let rho = &deref(rho, "rho")?.inner;
        let tol = if positivity_tol < 0.0 { DEFAULT_POSITIVITY_TOL } else { positivity_tol };
        let next = dynamics::propagate(l, rho, t, tol)?;
        write(out, "out", state_handle(next))
    })
}

/// Validated state from 16 row-major local-basis entries.
///
/// # Safety
/// `entries` must point to 16 `RtComplex` values.
#[no_mangle]
pub unsafe extern "C" fn rt_state_from_matrix(entries: *const RtComplex, out: *mut *mut RtState) -> RtStatus {
    guard(|| {
        if entries.is_null() {
            return Err(Failure::Null("entries"));
        }
        let e = std::slice::from_raw_parts(entries, 16);
        let m = Mat4::from_fn(|i, j| C64::new(e[4 * i + j].re, e[4 * i + j].im));
        let rho = DensityMatrix4::local(m)?;
        write(out, "out", state_handle(rho))
    })
}

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rt_state_bell(m: u8, n: u8, out: *mut *mut RtState) -> RtStatus {
    guard(|| {
        let p = Protocol::new(m, n)?;
        write(out, "out", state_handle(DensityMatrix4::bell(p.m, p.n)))
    })
}

/// Writes the 16 row-major local-basis entries.
///
/// # Safety
/// `rho` must be a live handle and `out` point to 16 writable `RtComplex`.
#[no_mangle]
pub unsafe extern "C" fn rt_state_matrix(rho: *const RtState, out: *mut RtComplex) -> RtStatus {
    guard(|| {
        let m = deref(rho, "rho")?.inner.matrix;
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let dst = std::slice::from_raw_parts_mut(out, 16);
        for i in 0..4 {
            for j in 0..4 {
                dst[4 * i + j] = RtComplex {
                    re: m[(i, j)].re,
                    im: m[(i, j)].im,
                };
            }
        }
        Ok(())
    })
}

/// # Safety
/// `rho` must be null or a state handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn rt_state_free(rho: *mut RtState) {
    if !rho.is_null() {
        drop(Box::from_raw(rho));
    }
}

/// Maximal average teleportation fidelity of the resource.
///
/// # Safety
/// `rho` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn rt_fmax(rho: *const RtState, out: *mut f64) -> RtStatus {
    guard(|| {
        let rho = &deref(rho, "rho")?.inner;
        write(out, "out", teleport::fmax_general(rho))
    })
}

/// # Safety
/// `rho` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn rt_concurrence(rho: *const RtState, out: *mut f64) -> RtStatus {
    guard(|| {
        let rho = &deref(rho, "rho")?.inner;
        write(out, "out", entanglement::concurrence(rho)?)
    })
}

/// Fidelity of protocol (m, n) for the input with Bloch angles θ, φ.
///
/// # Safety
/// `rho` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn rt_teleport_fidelity(
    rho: *const RtState,
    theta: f64,
    phi: f64,
    m: u8,
    n: u8,
    out: *mut f64,
) -> RtStatus {
    guard(|| {
        let rho = &deref(rho, "rho")?.inner;
        let input = InputState::new(theta, phi)?;
        write(out, "out", teleport::teleport_oracle(rho, &input, Protocol::new(m, n)?)?)
    })
}

/// Bloch-sphere average of protocol (m, n); closed form on X states,
/// quadrature of the given order otherwise (0 selects the default).
///
/// # Safety
/// `rho` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn rt_average_fidelity(rho: *const RtState, m: u8, n: u8, order: u32, out: *mut f64) -> RtStatus {
    guard(|| {
        let rho = &deref(rho, "rho")?.inner;
        let p = Protocol::new(m, n)?;
        let order = if order == 0 { teleport::DEFAULT_QUADRATURE_ORDER } else { order as usize };
        write(out, "out", teleport::average_fidelities(rho, order)?[p.index()])
    })
}

/// Protocol with the best average fidelity.
///
/// # Safety
/// `rho` must be a live handle; `m` and `n` valid.
#[no_mangle]
pub unsafe extern "C" fn rt_select_protocol(rho: *const RtState, order: u32, m: *mut u8, n: *mut u8) -> RtStatus {
    guard(|| {
        let rho = &deref(rho, "rho")?.inner;
        let order = if order == 0 { teleport::DEFAULT_QUADRATURE_ORDER } else { order as usize };
        let p = teleport::select_protocol(rho, order)?;
        write(m, "m", p.m)?;
        write(n, "n", p.n)
    })
}

/// Bose-Einstein or Fermi-Dirac occupation at frequency `omega`.
///
/// # Safety
/// `r` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn rt_occupation(omega: f64, r: *const RtReservoir, out: *mut f64) -> RtStatus {
    guard(|| {
        let r = reservoir(deref(r, "reservoir")?)?;
        write(out, "out", dynamics::occupation(omega, &r)?)
    })
}
