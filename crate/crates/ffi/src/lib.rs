//! C ABI over `blowup_lab`.
//!
//! Every function returns a [`BlStatus`]; results go through out-pointers. On failure the
//! message is kept per thread and read with [`bl_last_error_message`]. Handles are opaque
//! and released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use blowup_lab::exponents::{classify, fujita_exponent, gamma, strauss_exponent, Criticality, ProblemIndex, CRITICAL_TOL};
use blowup_lab::iteration::subcrit_threshold;
use blowup_lab::ode::{compute_multipliers_from, CoefficientProfile, MultiplierData};
use blowup_lab::testfuncs::{KernelConfig, SpectralKernel};
use blowup_lab::wave::{run, InitialBump, Mode, SolveReport, SolverConfig};
use blowup_lab::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    /// Non-convergence, missing multipliers, quadrature or support failures.
    NumericalFailure = 3,
    HypothesisViolation = 4,
    /// The requested value does not exist for this result, e.g. T_est without blow-up.
    NotAvailable = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> BlStatus {
    match err {
        Error::InvalidInput(_) | Error::Config(_) | Error::Io { .. } => BlStatus::InvalidInput,
        Error::HypothesisViolation(_) => BlStatus::HypothesisViolation,
        _ => BlStatus::NumericalFailure,
    }
}

fn fail(status: BlStatus, msg: impl Into<String>) -> BlStatus {
    set_error(msg.into());
    status
}

/// Runs `f` behind a panic guard, recording any error message.
fn guard<F>(f: F) -> BlStatus
where
    F: FnOnce() -> Result<(), BlStatus>,
{
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BlStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => fail(BlStatus::Panic, "internal panic"),
    }
}

fn lift<T>(r: blowup_lab::Result<T>) -> Result<T, BlStatus> {
    r.map_err(|e| fail(status_of(&e), e.to_string()))
}

unsafe fn write<T>(out: *mut T, v: T) -> Result<(), BlStatus> {
    if out.is_null() {
        return Err(fail(BlStatus::NullPointer, "output pointer is null"));
    }
    out.write(v);
    Ok(())
}

unsafe fn borrow<'a, T>(h: *const T) -> Result<&'a T, BlStatus> {
    h.as_ref().ok_or_else(|| fail(BlStatus::NullPointer, "handle is null"))
}

/// Message for the last failing call on this thread, or NULL. Valid until the next call.
#[no_mangle]
pub extern "C" fn bl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bl_strauss_exponent(n: u32, out: *mut f64) -> BlStatus {
    guard(|| write(out, lift(strauss_exponent(n))?))
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bl_fujita_exponent(n: u32, out: *mut f64) -> BlStatus {
    guard(|| write(out, lift(fujita_exponent(n))?))
}

/// gamma(p, n) = 2 + (n+1)p - (n-1)p^2.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bl_gamma(n: u32, p: f64, out: *mut f64) -> BlStatus {
    guard(|| write(out, gamma(lift(ProblemIndex::new(n, p))?)))
}

/// Writes -1 (sub-critical), 0 (critical) or 1 (super-critical).
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bl_classify(n: u32, p: f64, out: *mut i32) -> BlStatus {
    guard(|| {
        let v = lift(classify(lift(ProblemIndex::new(n, p))?, CRITICAL_TOL))?;
        let code = match v.class {
            Criticality::SubCritical => -1,
            Criticality::Critical => 0,
            Criticality::SuperCritical => 1,
        };
        write(out, code)
    })
}

/// Lifespan bound C4 eps^{-2p(p-1)/gamma} of the sub-critical iteration.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bl_subcrit_threshold(
    p: f64,
    n: u32,
    c_r1r2: f64,
    c2: f64,
    eps: f64,
    out: *mut f64,
) -> BlStatus {
    guard(|| write(out, lift(subcrit_threshold(p, n, c_r1r2, c2, eps))?.t))
}

/// Damping mu/(1+t)^beta and mass mu2/(1+t)^alpha_m.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlProfile {
    pub mu: f64,
    pub beta: f64,
    pub mu2: f64,
    pub alpha_m: f64,
}

impl BlProfile {
    fn build(&self) -> Result<CoefficientProfile, BlStatus> {
        lift(CoefficientProfile::scattering(self.mu, self.beta, self.mu2, self.alpha_m))
    }
}

pub struct BlMultipliers {
    inner: MultiplierData,
}

/// Multipliers r1, r2 on [t0, horizon] with grid `step`.
///
/// # Safety
/// `out` must be valid for writes; the handle is released with [`bl_multipliers_free`].
#[no_mangle]
pub unsafe extern "C" fn bl_multipliers_compute(
    profile: BlProfile,
    t0: f64,
    horizon: f64,
    step: f64,
    out: *mut *mut BlMultipliers,
) -> BlStatus {
    guard(|| {
        let inner = lift(compute_multipliers_from(&profile.build()?, t0, horizon, step))?;
        write(out, Box::into_raw(Box::new(BlMultipliers { inner })))
    })
}

/// # Safety
/// `h` must come from [`bl_multipliers_compute`]; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bl_multipliers_len(h: *const BlMultipliers, out: *mut usize) -> BlStatus {
    guard(|| write(out, borrow(h)?.inner.len()))
}

/// L1 norms of r1 and r2 on [t0, inf), and C_{r1,r2}.
///
/// # Safety
/// `h` must come from [`bl_multipliers_compute`]; the out-pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bl_multipliers_norms(
    h: *const BlMultipliers,
    l1_r1: *mut f64,
    l1_r2: *mut f64,
    c_r1r2: *mut f64,
) -> BlStatus {
    guard(|| {
        let m = &borrow(h)?.inner;
        write(l1_r1, m.l1_r1)?;
        write(l1_r2, m.l1_r2)?;
        write(c_r1r2, m.c_r1r2)
    })
}

/// Copies t, r1 and r2; each buffer needs `len` entries, see [`bl_multipliers_len`].
///
/// # Safety
/// `h` must come from [`bl_multipliers_compute`]; each non-null buffer must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn bl_multipliers_copy(
    h: *const BlMultipliers,
    t: *mut f64,
    r1: *mut f64,
    r2: *mut f64,
    len: usize,
) -> BlStatus {
    guard(|| {
        let m = &borrow(h)?.inner;
        let n = m.len();
        if len < n {
            return Err(fail(BlStatus::BufferTooSmall, format!("need {n} entries, got {len}")));
        }
        let times: Vec<f64> = (0..n).map(|i| m.t(i)).collect();
        for (dst, src) in [(t, &times), (r1, &m.r1), (r2, &m.r2)] {
            if !dst.is_null() {
                ptr::copy_nonoverlapping(src.as_ptr(), dst, n);
            }
        }
        Ok(())
    })
}

/// # Safety
/// `h` must come from [`bl_multipliers_compute`] and not be used afterwards. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn bl_multipliers_free(h: *mut BlMultipliers) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

pub struct BlKernel {
    inner: SpectralKernel,
}

/// xi_q / eta_q evaluator for radii up to `r_max`.
///
/// # Safety
/// `out` must be valid for writes; the handle is released with [`bl_kernel_free`].
#[no_mangle]
pub unsafe extern "C" fn bl_kernel_new(
    n: u32,
    q: f64,
    lambda0: f64,
    radius: f64,
    r_max: f64,
    out: *mut *mut BlKernel,
) -> BlStatus {
    guard(|| {
        if r_max.is_nan() || r_max < 0.0 {
            return Err(fail(BlStatus::InvalidInput, "r_max must be >= 0"));
        }
        let mut inner = lift(SpectralKernel::new(KernelConfig::new(n, q, lambda0, radius)))?;
        inner.prepare(r_max);
        write(out, Box::into_raw(Box::new(BlKernel { inner })))
    })
}

/// # Safety
/// `h` must come from [`bl_kernel_new`]; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bl_kernel_xi(h: *const BlKernel, r: f64, t: f64, out: *mut f64) -> BlStatus {
    guard(|| write(out, lift(borrow(h)?.inner.xi_q(r, t))?))
}

/// # Safety
/// `h` must come from [`bl_kernel_new`]; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bl_kernel_eta(h: *const BlKernel, r: f64, t: f64, s: f64, out: *mut f64) -> BlStatus {
    guard(|| write(out, lift(borrow(h)?.inner.eta_q(r, t, s))?))
}

/// phi_lambda(r) with the kernel's angular rules; lambda * r must stay within the prepared range.
///
/// # Safety
/// `h` must come from [`bl_kernel_new`]; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bl_kernel_phi(h: *const BlKernel, lambda: f64, r: f64, out: *mut f64) -> BlStatus {
    guard(|| write(out, lift(borrow(h)?.inner.phi.phi(lambda, r))?))
}

/// # Safety
/// `h` must come from [`bl_kernel_new`] and not be used afterwards. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn bl_kernel_free(h: *mut BlKernel) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Radial solver inputs. Fill with [`bl_solver_params_default`] and adjust.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlSolverParams {
    pub n: u32,
    pub p: f64,
    pub profile: BlProfile,
    /// Bump radius, smoothness exponent and amplitudes of u(0) and u_t(0).
    pub r0: f64,
    pub m: u32,
    pub f_amp: f64,
    pub g_amp: f64,
    pub eps: f64,
    pub h: f64,
    pub cfl: f64,
    pub horizon: f64,
    pub m_blow: f64,
    pub levels: u32,
    pub theorem_mode: bool,
    pub nonlinear: bool,
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bl_solver_params_default(out: *mut BlSolverParams) -> BlStatus {
    guard(|| {
        write(
            out,
            BlSolverParams {
                n: 3,
                p: 2.0,
                profile: BlProfile {
                    mu: 2.0,
                    beta: 2.0,
                    mu2: 1.0,
                    alpha_m: 1.5,
                },
                r0: 1.0,
                m: 4,
                f_amp: 1.0,
                g_amp: 1.0,
                eps: 0.5,
                h: 0.05,
                cfl: 1.0,
                horizon: 50.0,
                m_blow: 1e6,
                levels: 1,
                theorem_mode: false,
                nonlinear: true,
            },
        )
    })
}

pub struct BlSolveReport {
    inner: SolveReport,
}

/// # Safety
/// `params` must point to a valid struct; `out` must be valid for writes. The handle is
/// released with [`bl_report_free`].
#[no_mangle]
pub unsafe extern "C" fn bl_solve(params: *const BlSolverParams, out: *mut *mut BlSolveReport) -> BlStatus {
    guard(|| {
        let p = *borrow(params)?;
        let data = lift(InitialBump::new(p.r0, p.m, p.f_amp, p.g_amp, p.eps))?;
        let mut c = SolverConfig::new(p.n, p.p, p.profile.build()?, data);
        c.h = p.h;
        c.cfl = p.cfl;
        c.horizon = p.horizon;
        c.m_blow = p.m_blow;
        c.levels = p.levels as usize;
        c.mode = if p.theorem_mode { Mode::Theorem } else { Mode::Free };
        c.nonlinear = p.nonlinear;
        let inner = lift(run(&c))?;
        write(out, Box::into_raw(Box::new(BlSolveReport { inner })))
    })
}

/// # Safety
/// `h` must come from [`bl_solve`]; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bl_report_blow_up(h: *const BlSolveReport, out: *mut bool) -> BlStatus {
    guard(|| write(out, borrow(h)?.inner.blow_up))
}

/// Extrapolated blow-up time; `NotAvailable` when the run stayed bounded.
///
/// # Safety
/// `h` must come from [`bl_solve`]; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bl_report_t_est(h: *const BlSolveReport, out: *mut f64) -> BlStatus {
    guard(|| match borrow(h)?.inner.t_est {
        Some(t) => write(out, t),
        None => Err(fail(BlStatus::NotAvailable, "no blow-up before the horizon")),
    })
}

/// # Safety
/// `h` must come from [`bl_solve`]; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bl_report_trace_len(h: *const BlSolveReport, out: *mut usize) -> BlStatus {
    guard(|| write(out, borrow(h)?.inner.trace.len()))
}

pub const BL_TRACE_T: u32 = 0;
pub const BL_TRACE_G: u32 = 1;
pub const BL_TRACE_LP: u32 = 2;
pub const BL_TRACE_SUP_U: u32 = 3;
pub const BL_TRACE_SUPPORT_R: u32 = 4;

/// Copies one trace column (`BL_TRACE_*`) into `buf`.
///
/// # Safety
/// `h` must come from [`bl_solve`]; `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn bl_report_trace(h: *const BlSolveReport, column: u32, buf: *mut f64, len: usize) -> BlStatus {
    guard(|| {
        let tr = &borrow(h)?.inner.trace;
        let col = match column {
            BL_TRACE_T => &tr.t,
            BL_TRACE_G => &tr.g,
            BL_TRACE_LP => &tr.lp,
            BL_TRACE_SUP_U => &tr.sup_u,
            BL_TRACE_SUPPORT_R => &tr.support_r,
            _ => return Err(fail(BlStatus::InvalidInput, format!("unknown trace column {column}"))),
        };
        if buf.is_null() {
            return Err(fail(BlStatus::NullPointer, "buffer is null"));
        }
        if len < col.len() {
            return Err(fail(BlStatus::BufferTooSmall, format!("need {} entries, got {len}", col.len())));
        }
        ptr::copy_nonoverlapping(col.as_ptr(), buf, col.len());
        Ok(())
    })
}

/// # Safety
/// `h` must come from [`bl_solve`] and not be used afterwards. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn bl_report_free(h: *mut BlSolveReport) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}
