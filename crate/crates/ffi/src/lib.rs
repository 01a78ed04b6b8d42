//! C ABI over the `frac_yamabe` toolkit.
//!
//! Every function returns an [`FyStatus`]; on failure a message is kept per
//! thread and can be copied out with [`fy_last_error_message`]. Objects are
//! opaque handles created by `*_new`/producer functions and released with the
//! matching `*_free`. Array outputs follow one convention: pass `buf = NULL`
//! to query the length through `*len`; a non-null `buf` with `cap < *len`
//! yields `FY_STATUS_BUFFER_TOO_SMALL`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;
use std::slice;

use frac_yamabe::halfspace::{self, DirichletSolver, GridField, HalfStrip};
use frac_yamabe::sphere::{self, SolverOptions, Trichotomy, ZonalField};
use frac_yamabe::{constants, Error, FracParams};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FyStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Parameter = 3,
    Dimension = 4,
    NonConvergence = 5,
    Numeric = 6,
    Io = 7,
    Format = 8,
    BufferTooSmall = 9,
    InvalidUtf8 = 10,
    Panic = 11,
}

impl From<&Error> for FyStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Domain { .. } => FyStatus::Domain,
            Error::Parameter(_) => FyStatus::Parameter,
            Error::Dimension(_) => FyStatus::Dimension,
            Error::NonConvergence { .. } => FyStatus::NonConvergence,
            Error::Numeric { .. } => FyStatus::Numeric,
            Error::Io { .. } => FyStatus::Io,
            Error::Format(_) => FyStatus::Format,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FyTrichotomy {
    Positive = 1,
    Zero = 0,
    Negative = -1,
}

/// Opaque `(n, γ)` pair.
pub struct FyParams(FracParams);

/// Opaque zonal field on `Sⁿ`, stored by its harmonic coefficients.
pub struct FyZonalField(ZonalField);

/// Opaque periodic half-strip grid.
pub struct FyStrip(HalfStrip);

/// Opaque nodal field on a half-strip.
pub struct FyGridField(GridField);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct FyConstants {
    pub n: u32,
    pub gamma: f64,
    pub d_gamma: f64,
    pub dstar_paper: f64,
    pub c_ext: f64,
    pub s_sobolev: f64,
    pub s_bar: f64,
    pub lambda_sphere: f64,
    pub c1_bessel: f64,
    pub c_poisson: f64,
    /// Zero at `γ = 1`, where `c_bubble` is undefined.
    pub has_c_bubble: bool,
    pub c_bubble: f64,
    pub has_theta_hat: bool,
    pub theta_hat: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct FySolverOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub damping: f64,
    pub normalize_volume: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct FySolverReport {
    pub iterations: usize,
    pub final_residual: f64,
    pub c_beta: f64,
    pub min_value: f64,
    pub positivity_flag: bool,
    pub converged_flag: bool,
    pub monotone_after_damping: bool,
    pub final_damping: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct FyEigenReport {
    pub lambda1: f64,
    pub min_value: f64,
    pub iterations: usize,
    pub residual: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct FySolveStats {
    pub iterations: usize,
    pub relative_residual: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct FyHopfReport {
    pub value: f64,
    pub zero_index: usize,
    pub zero_x: f64,
    pub solver_residual: f64,
    pub min_interior: f64,
    pub max_principle: bool,
    pub passed: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(FyStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(FyStatus::from(&e), e.to_string())
    }
}

type Outcome = std::result::Result<(), Failure>;

fn null(what: &str) -> Failure {
    Failure(FyStatus::NullPointer, format!("{what} is NULL"))
}

fn guard(f: impl FnOnce() -> Outcome) -> FyStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            FyStatus::Ok
        }
        Ok(Err(Failure(code, msg))) => {
            set_last_error(msg);
            code
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            FyStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn input<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn copy_out(src: &[f64], buf: *mut f64, cap: usize, len: *mut usize) -> Outcome {
    *out(len, "len")? = src.len();
    if buf.is_null() {
        return Ok(());
    }
    if cap < src.len() {
        return Err(Failure(
            FyStatus::BufferTooSmall,
            format!("buffer holds {cap} values, {} needed", src.len()),
        ));
    }
    ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len());
    Ok(())
}

unsafe fn path_arg<'a>(p: *const c_char) -> Result<&'a Path, Failure> {
    if p.is_null() {
        return Err(null("path"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map(Path::new)
        .map_err(|_| Failure(FyStatus::InvalidUtf8, "path is not valid UTF-8".into()))
}

fn boxed<T>(slot: &mut *mut T, value: T) {
    *slot = Box::into_raw(Box::new(value));
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fy_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the calling thread's last error message into `buf` (truncated and
/// NUL-terminated) and returns the full length including the terminator.
/// Returns 0 when the last call succeeded.
///
/// # Safety
/// `buf` must be NULL or valid for `cap` bytes.
#[no_mangle]
pub unsafe extern "C" fn fy_last_error_message(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes_with_nul();
        if !buf.is_null() && cap > 0 {
            let k = bytes.len().min(cap) - 1;
            ptr::copy_nonoverlapping(bytes.as_ptr().cast(), buf, k);
            *buf.add(k) = 0;
        }
        bytes.len()
    })
}

/// # Safety
/// `out` must be a valid pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn fy_params_new(n: u32, gamma: f64, out_params: *mut *mut FyParams) -> FyStatus {
    guard(|| {
        let slot = out(out_params, "out_params")?;
        let p = if gamma == 1.0 {
            FracParams::with_endpoint(n, gamma)?
        } else {
            FracParams::new(n, gamma)?
        };
        boxed(slot, FyParams(p));
        Ok(())
    })
}

/// # Safety
/// `p` must be NULL or a handle from `fy_params_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fy_params_free(p: *mut FyParams) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Critical exponent `2n/(n−2γ)`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fy_params_two_star(p: *const FyParams, value: *mut f64) -> FyStatus {
    guard(|| {
        *out(value, "value")? = deref(p, "params")?.0.two_star();
        Ok(())
    })
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fy_constants(p: *const FyParams, result: *mut FyConstants) -> FyStatus {
    guard(|| {
        let params = deref(p, "params")?.0;
        let slot = out(result, "result")?;
        let b = constants::make_constants(&params)?;
        *slot = FyConstants {
            n: b.n,
            gamma: b.gamma,
            d_gamma: b.d_gamma,
            dstar_paper: b.dstar_paper,
            c_ext: b.c_ext,
            s_sobolev: b.s_sobolev,
            s_bar: b.s_bar,
            lambda_sphere: b.lambda_sphere,
            c1_bessel: b.c1_bessel,
            c_poisson: b.c_poisson,
            has_c_bubble: b.c_bubble.is_some(),
            c_bubble: b.c_bubble.unwrap_or(0.0),
            has_theta_hat: b.theta_hat.is_some(),
            theta_hat: b.theta_hat.unwrap_or(0.0),
        };
        Ok(())
    })
}

/// Multipliers of `P_γ` on degrees `0..=kmax` of the round sphere.
///
/// # Safety
/// See the crate-level buffer convention.
#[no_mangle]
pub unsafe extern "C" fn fy_sphere_multipliers(
    p: *const FyParams,
    kmax: usize,
    buf: *mut f64,
    cap: usize,
    len: *mut usize,
) -> FyStatus {
    guard(|| {
        let params = deref(p, "params")?.0;
        copy_out(&sphere::multipliers(&params, kmax), buf, cap, len)
    })
}

/// # Safety
/// `coeffs` must be valid for `len` reads; `out_field` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fy_zonal_new(
    n: u32,
    coeffs: *const f64,
    len: usize,
    out_field: *mut *mut FyZonalField,
) -> FyStatus {
    guard(|| {
        let slot = out(out_field, "out_field")?;
        let c = input(coeffs, len, "coeffs")?.to_vec();
        boxed(slot, FyZonalField(ZonalField::new(n, c)?));
        Ok(())
    })
}

/// The constant field `c` with band limit `k`.
///
/// # Safety
/// `out_field` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fy_zonal_constant(n: u32, k: usize, c: f64, out_field: *mut *mut FyZonalField) -> FyStatus {
    guard(|| {
        let slot = out(out_field, "out_field")?;
        boxed(slot, FyZonalField(ZonalField::constant(n, k, c)?));
        Ok(())
    })
}

/// # Safety
/// `f` must be NULL or a live zonal handle.
#[no_mangle]
pub unsafe extern "C" fn fy_zonal_free(f: *mut FyZonalField) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// # Safety
/// See the crate-level buffer convention.
#[no_mangle]
pub unsafe extern "C" fn fy_zonal_coeffs(
    f: *const FyZonalField,
    buf: *mut f64,
    cap: usize,
    len: *mut usize,
) -> FyStatus {
    guard(|| copy_out(deref(f, "field")?.0.coeffs(), buf, cap, len))
}

/// Value at the point with polar cosine `x ∈ [−1, 1]`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fy_zonal_eval(f: *const FyZonalField, x: f64, value: *mut f64) -> FyStatus {
    guard(|| {
        let field = &deref(f, "field")?.0;
        if !(-1.0..=1.0).contains(&x) {
            return Err(Failure(FyStatus::Domain, format!("x = {x} outside [-1, 1]")));
        }
        *out(value, "value")? = field.eval(x);
        Ok(())
    })
}

/// Fractional Yamabe quotient of `w` on the round sphere.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fy_sphere_yamabe_functional(
    f: *const FyZonalField,
    p: *const FyParams,
    value: *mut f64,
) -> FyStatus {
    guard(|| {
        let v = sphere::yamabe_functional(&deref(f, "field")?.0, &deref(p, "params")?.0)?;
        *out(value, "value")? = v;
        Ok(())
    })
}

/// Default options of the subcritical solver.
#[no_mangle]
pub extern "C" fn fy_solver_options_default() -> FySolverOptions {
    let o = SolverOptions::default();
    FySolverOptions {
        tol: o.tol,
        max_iter: o.max_iter,
        damping: o.damping,
        normalize_volume: o.normalize_volume,
    }
}

/// Damped fixed-point solve of `P_γ w = c_β w^{β−1}`. Running out of
/// iterations is not an error: check `report->converged_flag`.
///
/// # Safety
/// Pointers must be valid; `out_field` may be NULL to discard the solution.
#[no_mangle]
pub unsafe extern "C" fn fy_sphere_subcritical_solve(
    p: *const FyParams,
    beta: f64,
    init: *const FyZonalField,
    opts: FySolverOptions,
    out_field: *mut *mut FyZonalField,
    report: *mut FySolverReport,
) -> FyStatus {
    guard(|| {
        let params = deref(p, "params")?.0;
        let init = &deref(init, "init")?.0;
        let rep_slot = out(report, "report")?;
        let o = SolverOptions {
            tol: opts.tol,
            max_iter: opts.max_iter,
            damping: opts.damping,
            normalize_volume: opts.normalize_volume,
        };
        let (w, r) = sphere::subcritical_solve(beta, init, &params, o)?;
        *rep_slot = FySolverReport {
            iterations: r.iterations,
            final_residual: r.final_residual,
            c_beta: r.c_beta,
            min_value: r.min_value,
            positivity_flag: r.positivity_flag,
            converged_flag: r.converged_flag,
            monotone_after_damping: r.monotone_after_damping,
            final_damping: r.final_damping,
        };
        if let Some(slot) = out_field.as_mut() {
            boxed(slot, FyZonalField(w));
        }
        Ok(())
    })
}

/// First eigenpair of the conformal operator of the metric `w^{4/(n−2γ)}` times round.
///
/// # Safety
/// Pointers must be valid; `out_field` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn fy_sphere_first_eigenvalue(
    w: *const FyZonalField,
    p: *const FyParams,
    tol: f64,
    out_field: *mut *mut FyZonalField,
    report: *mut FyEigenReport,
) -> FyStatus {
    guard(|| {
        let e = sphere::first_eigenvalue(&deref(w, "wfactor")?.0, &deref(p, "params")?.0, tol)?;
        *out(report, "report")? = FyEigenReport {
            lambda1: e.lambda1,
            min_value: e.min_value,
            iterations: e.iterations,
            residual: e.residual,
        };
        if let Some(slot) = out_field.as_mut() {
            boxed(slot, FyZonalField(e.eigfield));
        }
        Ok(())
    })
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fy_sphere_trichotomy(
    w: *const FyZonalField,
    p: *const FyParams,
    class: *mut FyTrichotomy,
) -> FyStatus {
    guard(|| {
        let t = sphere::trichotomy_classify(&deref(w, "wfactor")?.0, &deref(p, "params")?.0)?;
        *out(class, "class")? = match t {
            Trichotomy::Positive => FyTrichotomy::Positive,
            Trichotomy::Zero => FyTrichotomy::Zero,
            Trichotomy::Negative => FyTrichotomy::Negative,
        };
        Ok(())
    })
}

/// Strip `[0, period) × [0, height]` with `nx × ny` unknowns and weight
/// exponent `a = 1 − 2γ` taken from `p`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fy_strip_new(
    p: *const FyParams,
    period: f64,
    height: f64,
    nx: usize,
    ny: usize,
    out_strip: *mut *mut FyStrip,
) -> FyStatus {
    guard(|| {
        let params = deref(p, "params")?.0;
        let slot = out(out_strip, "out_strip")?;
        boxed(slot, FyStrip(HalfStrip::for_params(&params, period, height, nx, ny)?));
        Ok(())
    })
}

/// # Safety
/// `s` must be NULL or a live strip handle.
#[no_mangle]
pub unsafe extern "C" fn fy_strip_free(s: *mut FyStrip) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Abscissae of the `nx` columns.
///
/// # Safety
/// See the crate-level buffer convention.
#[no_mangle]
pub unsafe extern "C" fn fy_strip_x(s: *const FyStrip, buf: *mut f64, cap: usize, len: *mut usize) -> FyStatus {
    guard(|| {
        let strip = &deref(s, "strip")?.0;
        let x: Vec<f64> = (0..strip.nx()).map(|i| strip.x(i)).collect();
        copy_out(&x, buf, cap, len)
    })
}

/// Heights of all `ny + 2` rows, boundary and cap included.
///
/// # Safety
/// See the crate-level buffer convention.
#[no_mangle]
pub unsafe extern "C" fn fy_strip_y(s: *const FyStrip, buf: *mut f64, cap: usize, len: *mut usize) -> FyStatus {
    guard(|| copy_out(deref(s, "strip")?.0.y_nodes(), buf, cap, len))
}

/// Solves `div(y^a ∇U) = 0` with `U = trace` at `y = 0` and `U = cap` at the
/// top. Both arrays hold `nx` values; `cap` may be NULL for a zero cap.
///
/// # Safety
/// `trace` (and `cap` if non-null) must be valid for `nx` reads.
#[no_mangle]
pub unsafe extern "C" fn fy_halfspace_solve(
    s: *const FyStrip,
    trace: *const f64,
    cap: *const f64,
    len: usize,
    tol: f64,
    out_field: *mut *mut FyGridField,
    stats: *mut FySolveStats,
) -> FyStatus {
    guard(|| {
        let strip = &deref(s, "strip")?.0;
        let slot = out(out_field, "out_field")?;
        let trace = input(trace, len, "trace")?;
        let zero;
        let cap = if cap.is_null() {
            zero = vec![0.0; len];
            &zero[..]
        } else {
            input(cap, len, "cap")?
        };
        let (u, st) = DirichletSolver::new(strip).solve(trace, cap, tol)?;
        if let Some(stats) = stats.as_mut() {
            *stats = FySolveStats {
                iterations: st.iterations,
                relative_residual: st.relative_residual,
            };
        }
        boxed(slot, FyGridField(u));
        Ok(())
    })
}

/// # Safety
/// `f` must be NULL or a live grid handle.
#[no_mangle]
pub unsafe extern "C" fn fy_grid_free(f: *mut FyGridField) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Grid shape: columns and total rows (`ny + 2`).
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fy_grid_shape(f: *const FyGridField, nx: *mut usize, rows: *mut usize) -> FyStatus {
    guard(|| {
        let s = deref(f, "field")?.0.strip();
        *out(nx, "nx")? = s.nx();
        *out(rows, "rows")? = s.rows();
        Ok(())
    })
}

/// Nodal values, row-major with `y` outer.
///
/// # Safety
/// See the crate-level buffer convention.
#[no_mangle]
pub unsafe extern "C" fn fy_grid_values(f: *const FyGridField, buf: *mut f64, cap: usize, len: *mut usize) -> FyStatus {
    guard(|| copy_out(deref(f, "field")?.0.values(), buf, cap, len))
}

/// Fractional Laplacian of the trace recovered from the weighted normal derivative.
///
/// # Safety
/// See the crate-level buffer convention.
#[no_mangle]
pub unsafe extern "C" fn fy_grid_neumann_trace(
    f: *const FyGridField,
    p: *const FyParams,
    buf: *mut f64,
    cap: usize,
    len: *mut usize,
) -> FyStatus {
    guard(|| {
        let v = halfspace::neumann_trace(&deref(f, "field")?.0, &deref(p, "params")?.0)?;
        copy_out(&v, buf, cap, len)
    })
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fy_grid_max_principle(f: *const FyGridField, holds: *mut bool) -> FyStatus {
    guard(|| {
        *out(holds, "holds")? = halfspace::verify_max_principle(&deref(f, "field")?.0);
        Ok(())
    })
}

/// Writes the field; a `.bin` extension selects the binary format, anything else CSV.
///
/// # Safety
/// `path` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn fy_grid_save(f: *const FyGridField, path: *const c_char) -> FyStatus {
    guard(|| {
        deref(f, "field")?.0.save(path_arg(path)?)?;
        Ok(())
    })
}

/// # Safety
/// `path` must be a NUL-terminated string; `out_field` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fy_grid_load(path: *const c_char, out_field: *mut *mut FyGridField) -> FyStatus {
    guard(|| {
        let slot = out(out_field, "out_field")?;
        boxed(slot, FyGridField(GridField::load(path_arg(path)?)?));
        Ok(())
    })
}

/// Hopf-type check for a nonnegative trace of `nx` values vanishing somewhere.
///
/// # Safety
/// `trace` must be valid for `len` reads.
#[no_mangle]
pub unsafe extern "C" fn fy_hopf_check(
    s: *const FyStrip,
    p: *const FyParams,
    trace: *const f64,
    len: usize,
    tol: f64,
    report: *mut FyHopfReport,
) -> FyStatus {
    guard(|| {
        let strip = &deref(s, "strip")?.0;
        let params = deref(p, "params")?.0;
        let slot = out(report, "report")?;
        let r = halfspace::hopf_positivity_check(strip, &params, input(trace, len, "trace")?, tol)?;
        *slot = FyHopfReport {
            value: r.value,
            zero_index: r.zero_index,
            zero_x: r.zero_x,
            solver_residual: r.solver_residual,
            min_interior: r.min_interior,
            max_principle: r.max_principle,
            passed: r.passed,
        };
        Ok(())
    })
}
