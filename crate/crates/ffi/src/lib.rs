//! C ABI over the `hiddencorr` core.
//!
//! Every fallible function returns an [`HcStatus`] and writes its result
//! through an out-pointer. On failure the message is available from
//! [`hc_last_error`] on the same thread until the next failing call.
//! States are opaque heap handles released with [`hc_state_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use hiddencorr::correlations::{self, Criterion, Method};
use hiddencorr::expsim::{run_experiment, ExperimentConfig};
use hiddencorr::filters::{Filtering, LocalFilter};
use hiddencorr::qmat::ComplexMatrix;
use hiddencorr::states::{self, StateParams, TwoQubitState};
use hiddencorr::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HcStatus {
    Ok = 0,
    NullPointer = 1,
    /// Argument outside its domain.
    Domain = 2,
    /// Matrix is not a valid density matrix.
    InvalidState = 3,
    /// Eigen-iteration, fit or conditional probability failed.
    Numerical = 4,
    /// The criterion never changes sign on p ∈ [0, 1].
    NoThreshold = 5,
    Panic = 99,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HcFilter {
    None = 0,
    F = 1,
    G = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HcCriterion {
    Entangled = 0,
    BellNonlocal = 1,
    Steerable = 2,
    UnsteerCertified = 3,
    HiddenSteerF = 4,
    HiddenSteerG = 5,
    HiddenBellF = 6,
    HiddenBellG = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HcMethod {
    ClosedForm = 0,
    Bisection = 1,
}

/// Opaque validated two-qubit density matrix.
pub struct HcState(TwoQubitState);

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct HcExperimentConfig {
    pub p: f64,
    pub theta: f64,
    pub filter: HcFilter,
    pub n_per_setting: u64,
    pub accidentals: f64,
    pub sets: u64,
    pub fidelity: f64,
    pub seed: u64,
    pub subtract_accidentals: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct HcExperimentSummary {
    pub s_mean: f64,
    pub s_std: f64,
    pub s_sem: f64,
    pub t_mean: f64,
    pub t_std: f64,
    pub t_sem: f64,
    pub tu_mean: f64,
    pub tu_std: f64,
    pub tu_sem: f64,
    pub s_exact: f64,
    pub t_exact: f64,
    pub tu_exact: f64,
    pub success_prob: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> HcStatus {
    match e {
        Error::Domain(_) | Error::Dimension(_) | Error::FilteredToZero { .. } => HcStatus::Domain,
        Error::NonFinite | Error::NotHermitian { .. } | Error::NotPsd { .. } | Error::InvalidState(_) => {
            HcStatus::InvalidState
        }
        _ => HcStatus::Numerical,
    }
}

/// Runs `body`, converting errors and panics into status codes.
fn guard(body: impl FnOnce() -> Result<(), (HcStatus, String)>) -> HcStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => HcStatus::Ok,
        Ok(Err((status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            HcStatus::Panic
        }
    }
}

fn core<T>(r: hiddencorr::Result<T>) -> Result<T, (HcStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(name: &str) -> (HcStatus, String) {
    (HcStatus::NullPointer, format!("{name} is NULL"))
}

/// # Safety
/// `ptr` is NULL or valid for writes of `T`.
unsafe fn write_out<T>(ptr: *mut T, name: &str, value: T) -> Result<(), (HcStatus, String)> {
    if ptr.is_null() {
        return Err(null(name));
    }
    ptr.write(value);
    Ok(())
}

/// # Safety
/// `ptr` is NULL or points to a live handle.
unsafe fn state_ref<'a>(ptr: *const HcState, name: &str) -> Result<&'a TwoQubitState, (HcStatus, String)> {
    ptr.as_ref().map(|s| &s.0).ok_or_else(|| null(name))
}

fn to_filtering(f: HcFilter) -> Filtering {
    match f {
        HcFilter::None => Filtering::None,
        HcFilter::F => Filtering::F,
        HcFilter::G => Filtering::G,
    }
}

fn boxed(state: TwoQubitState) -> *mut HcState {
    Box::into_raw(Box::new(HcState(state)))
}

/// Builds ρ(p, θ). `theta` in (0, π/4], `p` in [0, 1].
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn hc_state_noisy(p: f64, theta: f64, out: *mut *mut HcState) -> HcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let params = core(StateParams::new(p, theta))?;
        write_out(out, "out", boxed(states::noisy_state(params)))
    })
}

/// Validates a row-major 4×4 matrix given as separate real and imaginary arrays of 16.
///
/// # Safety
/// `re` and `im` must each point to 16 readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hc_state_from_matrix(re: *const f64, im: *const f64, out: *mut *mut HcState) -> HcStatus {
    guard(|| {
        if re.is_null() {
            return Err(null("re"));
        }
        if im.is_null() {
            return Err(null("im"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let (re, im) = (std::slice::from_raw_parts(re, 16), std::slice::from_raw_parts(im, 16));
        let m = core(ComplexMatrix::from_parts(4, 4, re, im))?;
        let state = core(TwoQubitState::new(m))?;
        write_out(out, "out", boxed(state))
    })
}

/// Copies the matrix row-major into two arrays of 16 doubles.
///
/// # Safety
/// `state` must be a live handle; `re_out` and `im_out` must hold 16 doubles each.
#[no_mangle]
pub unsafe extern "C" fn hc_state_matrix(state: *const HcState, re_out: *mut f64, im_out: *mut f64) -> HcStatus {
    guard(|| {
        let s = state_ref(state, "state")?;
        if re_out.is_null() {
            return Err(null("re_out"));
        }
        if im_out.is_null() {
            return Err(null("im_out"));
        }
        let (re, im) = (std::slice::from_raw_parts_mut(re_out, 16), std::slice::from_raw_parts_mut(im_out, 16));
        for (k, z) in s.matrix().entries().iter().enumerate() {
            re[k] = z.re;
            im[k] = z.im;
        }
        Ok(())
    })
}

/// Releases a handle. NULL is ignored.
///
/// # Safety
/// `state` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hc_state_free(state: *mut HcState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Applies diag(a0, a1) ⊗ diag(b0, b1) and renormalizes; writes the new
/// handle and the success probability relative to the normalized filter.
///
/// # Safety
/// `state` must be a live handle; `out` must be writable; `success_prob` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn hc_filter_apply(
    state: *const HcState,
    a0: f64,
    a1: f64,
    b0: f64,
    b1: f64,
    out: *mut *mut HcState,
    success_prob: *mut f64,
) -> HcStatus {
    guard(|| {
        let s = state_ref(state, "state")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let filter = core(LocalFilter::new([a0, a1], [b0, b1]))?.normalize();
        let filtered = core(filter.apply(s))?;
        if !success_prob.is_null() {
            success_prob.write(filtered.success_prob);
        }
        write_out(out, "out", boxed(filtered.state))
    })
}

/// Applies the named filter built for Schmidt angle `theta`.
///
/// # Safety
/// As for [`hc_filter_apply`].
#[no_mangle]
pub unsafe extern "C" fn hc_filter_named(
    state: *const HcState,
    filter: HcFilter,
    theta: f64,
    out: *mut *mut HcState,
    success_prob: *mut f64,
) -> HcStatus {
    guard(|| {
        let s = state_ref(state, "state")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let filtered = core(hiddencorr::filters::apply_named(to_filtering(filter), theta, s))?;
        if !success_prob.is_null() {
            success_prob.write(filtered.success_prob);
        }
        write_out(out, "out", boxed(filtered.state))
    })
}

/// # Safety
/// `state` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hc_concurrence(state: *const HcState, out: *mut f64) -> HcStatus {
    guard(|| write_out(out, "out", correlations::concurrence(state_ref(state, "state")?)))
}

/// Maximal CHSH value 2√(Γ₁ + Γ₂).
///
/// # Safety
/// `state` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hc_horodecki_s(state: *const HcState, out: *mut f64) -> HcStatus {
    guard(|| write_out(out, "out", correlations::horodecki_s(state_ref(state, "state")?)))
}

/// Steering parameter with Alice measuring σz then σx.
///
/// # Safety
/// `state` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hc_steering_t(state: *const HcState, out: *mut f64) -> HcStatus {
    guard(|| {
        let t = core(correlations::steering_t_zx(state_ref(state, "state")?))?;
        write_out(out, "out", t)
    })
}

/// Unsteerability certificate T_U of ρ(p, θ).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hc_unsteerability_tu(p: f64, theta: f64, out: *mut f64) -> HcStatus {
    guard(|| {
        let params = core(StateParams::new(p, theta))?;
        write_out(out, "out", correlations::unsteerability_tu(params))
    })
}

/// θ = arccot √γ for γ ≥ 1.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hc_gamma_to_theta(gamma: f64, out: *mut f64) -> HcStatus {
    guard(|| {
        let theta = core(states::gamma_to_theta(gamma))?;
        write_out(out, "out", theta)
    })
}

/// Critical p of `criterion` at `gamma`. Returns `NoThreshold` when the
/// criterion never switches on [0, 1].
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hc_threshold_p(
    criterion: HcCriterion,
    gamma: f64,
    method: HcMethod,
    out: *mut f64,
) -> HcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let c = Criterion::ALL[criterion as usize];
        let m = match method {
            HcMethod::ClosedForm => Method::ClosedForm,
            HcMethod::Bisection => Method::Bisection,
        };
        match core(correlations::threshold_p(c, gamma, m))? {
            Some(p) => write_out(out, "out", p),
            None => Err((HcStatus::NoThreshold, format!("{c} has no threshold at gamma = {gamma}"))),
        }
    })
}

/// Runs the counting experiment and writes the per-set statistics.
///
/// # Safety
/// `config` must be readable; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hc_experiment_run(
    config: *const HcExperimentConfig,
    out: *mut HcExperimentSummary,
) -> HcStatus {
    guard(|| {
        let c = config.as_ref().ok_or_else(|| null("config"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let sets = usize::try_from(c.sets).map_err(|_| (HcStatus::Domain, "sets too large".to_string()))?;
        let cfg = ExperimentConfig {
            params: core(StateParams::new(c.p, c.theta))?,
            filter: to_filtering(c.filter),
            n_per_setting: c.n_per_setting,
            accidentals: c.accidentals,
            sets,
            fidelity: c.fidelity,
            seed: c.seed,
            subtract_accidentals: c.subtract_accidentals,
        };
        let r = core(run_experiment(&cfg))?;
        write_out(
            out,
            "out",
            HcExperimentSummary {
                s_mean: r.s_mean,
                s_std: r.s_std,
                s_sem: r.s_sem,
                t_mean: r.t_mean,
                t_std: r.t_std,
                t_sem: r.t_sem,
                tu_mean: r.tu_mean,
                tu_std: r.tu_std,
                tu_sem: r.tu_sem,
                s_exact: r.s_exact,
                t_exact: r.t_exact,
                tu_exact: r.tu_exact,
                success_prob: r.success_prob,
            },
        )
    })
}

/// Message of the last failing call on this thread; empty if none.
/// The pointer stays valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn hc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

#[cfg(test)]
mod tests {
    use std::ffi::CStr;

    use super::*;

    #[test]
    fn panics_become_status() {
        let status = guard(|| panic!("boom"));
        assert_eq!(status, HcStatus::Panic);
        assert_eq!(unsafe { CStr::from_ptr(hc_last_error()) }.to_str().unwrap(), "internal panic");
    }

    #[test]
    fn error_mapping() {
        assert_eq!(status_of(&Error::Domain("x".into())), HcStatus::Domain);
        assert_eq!(status_of(&Error::NotPsd { min_eigenvalue: -1.0 }), HcStatus::InvalidState);
        assert_eq!(status_of(&Error::FitDiverged { residual: 1.0 }), HcStatus::Numerical);
    }

    #[test]
    fn criterion_order_matches_core() {
        let pairs = [
            (HcCriterion::Entangled, "entangled"),
            (HcCriterion::BellNonlocal, "bell"),
            (HcCriterion::Steerable, "steer"),
            (HcCriterion::UnsteerCertified, "unsteer_root"),
            (HcCriterion::HiddenSteerF, "hidden_steer_f"),
            (HcCriterion::HiddenSteerG, "hidden_steer_g"),
            (HcCriterion::HiddenBellF, "hidden_bell_f"),
            (HcCriterion::HiddenBellG, "hidden_bell_g"),
        ];
        for (c, name) in pairs {
            assert_eq!(Criterion::ALL[c as usize].name(), name);
        }
    }

    #[test]
    fn interior_nul_is_sanitized() {
        set_last_error("a\0b");
        assert_eq!(unsafe { CStr::from_ptr(hc_last_error()) }.to_str().unwrap(), "a b");
    }
}
