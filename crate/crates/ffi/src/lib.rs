//! C ABI over `omd-tch`.
//!
//! Every function returns an [`OmdStatus`]; on failure the message is kept in
//! thread-local storage and can be read with [`omd_last_error_message`].
//! Handles are opaque and must be released with their `_free` function.
//! Arrays are passed as pointer plus length.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use omd_tch::bounds::{convergence_bound, optimal_step_sizes, BoundConstants, BoundVariant};
use omd_tch::problems::{QuadraticBiObjective, Vlmop2};
use omd_tch::{
    project_simplex, run, tch_value, DecisionVector, InsertOutcome, Method, MooError, NadirPoint, ObjectiveValues, ParetoArchive, PreferenceVector,
    Problem, SolveResult, SolverConfig,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OmdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    NonFinite = 4,
    NadirViolation = 5,
    ArchiveError = 6,
    Panic = 7,
}

/// Solver method, in the order of the `omd-tch` CLI names.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OmdMethod {
    Ls = 0,
    Tch = 1,
    Stch = 2,
    OmdGd = 3,
    OmdEg = 4,
    AdaOmdGd = 5,
    AdaOmdEg = 6,
}

impl From<OmdMethod> for Method {
    fn from(m: OmdMethod) -> Self {
        match m {
            OmdMethod::Ls => Method::Ls,
            OmdMethod::Tch => Method::Tch,
            OmdMethod::Stch => Method::Stch,
            OmdMethod::OmdGd => Method::OmdGd,
            OmdMethod::OmdEg => Method::OmdEg,
            OmdMethod::AdaOmdGd => Method::AdaOmdGd,
            OmdMethod::AdaOmdEg => Method::AdaOmdEg,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OmdBoundVariant {
    PgdPgd = 0,
    PgdEg = 1,
}

/// Solver settings. `theta_box <= 0` means no box.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmdSolverConfig {
    pub method: OmdMethod,
    pub rounds: usize,
    pub eta_theta: f64,
    pub eta_lambda: f64,
    pub mu: f64,
    pub seed: u64,
    pub init_scale: f64,
    pub theta_box: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmdBoundConstants {
    pub u: f64,
    pub l: f64,
    pub r_theta: f64,
    pub d: usize,
    pub m: usize,
    pub t: usize,
}

/// Opaque problem handle.
pub struct OmdProblem(Box<dyn Problem>);

/// Opaque solve result.
pub struct OmdResult(SolveResult);

/// Opaque Pareto archive.
pub struct OmdArchive(ParetoArchive);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &MooError) -> OmdStatus {
    match e {
        MooError::Dimension { .. } => OmdStatus::DimensionMismatch,
        MooError::Validation(_) => OmdStatus::InvalidArgument,
        MooError::NadirViolation { .. } => OmdStatus::NadirViolation,
        MooError::NonFinite(_) => OmdStatus::NonFinite,
        MooError::Archive(_) => OmdStatus::ArchiveError,
    }
}

enum Fail {
    Moo(MooError),
    Null(&'static str),
}

impl From<MooError> for Fail {
    fn from(e: MooError) -> Self {
        Fail::Moo(e)
    }
}

fn guard<F: FnOnce() -> Result<(), Fail>>(f: F) -> OmdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            OmdStatus::Ok
        }
        Ok(Err(Fail::Moo(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            OmdStatus::NullPointer
        }
        Err(_) => {
            set_error("panic inside omd-tch".into());
            OmdStatus::Panic
        }
    }
}

unsafe fn slice<'a>(p: *const f64, n: usize, what: &'static str) -> Result<&'a [f64], Fail> {
    if n == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, n))
}

unsafe fn slice_mut<'a>(p: *mut f64, n: usize, what: &'static str) -> Result<&'a mut [f64], Fail> {
    if n == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, n))
}

unsafe fn handle<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or(Fail::Null(what))
}

fn copy_into(dst: &mut [f64], src: &[f64], context: &'static str) -> Result<(), Fail> {
    if dst.len() != src.len() {
        return Err(MooError::Dimension { context, expected: src.len(), got: dst.len() }.into());
    }
    dst.copy_from_slice(src);
    Ok(())
}

/// Error message of the most recent call on this thread, or NULL when that
/// call succeeded. Valid until the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn omd_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn omd_problem_vlmop2_new(d: usize, out_problem: *mut *mut OmdProblem) -> OmdStatus {
    guard(|| {
        let slot = out(out_problem, "out_problem")?;
        *slot = Box::into_raw(Box::new(OmdProblem(Box::new(Vlmop2::new(d)?))));
        Ok(())
    })
}

/// Two isotropic quadratics with seeded random anchors.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn omd_problem_quadratic_new(d: usize, seed: u64, out_problem: *mut *mut OmdProblem) -> OmdStatus {
    guard(|| {
        let slot = out(out_problem, "out_problem")?;
        *slot = Box::into_raw(Box::new(OmdProblem(Box::new(QuadraticBiObjective::random(d, seed)?))));
        Ok(())
    })
}

/// # Safety
/// `problem` must come from a `omd_problem_*_new` call and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn omd_problem_free(problem: *mut OmdProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// # Safety
/// `problem` must be a live handle; out pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn omd_problem_shape(problem: *const OmdProblem, out_m: *mut usize, out_d: *mut usize) -> OmdStatus {
    guard(|| {
        let p = handle(problem, "problem")?;
        *out(out_m, "out_m")? = p.0.num_objectives();
        *out(out_d, "out_d")? = p.0.dim();
        Ok(())
    })
}

/// Writes f(θ) into `out_f[0..m]`.
///
/// # Safety
/// Arrays must hold the given number of elements.
#[no_mangle]
pub unsafe extern "C" fn omd_problem_evaluate(
    problem: *const OmdProblem,
    theta: *const f64,
    d: usize,
    out_f: *mut f64,
    m: usize,
) -> OmdStatus {
    guard(|| {
        let p = handle(problem, "problem")?;
        let f = omd_tch::evaluate(p.0.as_ref(), &DecisionVector::new(slice(theta, d, "theta")?.to_vec())?)?;
        copy_into(slice_mut(out_f, m, "out_f")?, f.as_slice(), "out_f")
    })
}

/// Defaults used by the CLI for `method`.
#[no_mangle]
pub extern "C" fn omd_solver_config_default(method: OmdMethod) -> OmdSolverConfig {
    let c = SolverConfig::new(method.into(), PreferenceVector::uniform(2).expect("m = 2"));
    OmdSolverConfig {
        method,
        rounds: c.rounds,
        eta_theta: c.eta_theta,
        eta_lambda: c.eta_lambda,
        mu: c.mu,
        seed: c.seed,
        init_scale: c.init_scale,
        theta_box: 0.0,
    }
}

/// # Safety
/// `config` and `preference[0..m]` must be readable; `out_result` writable.
#[no_mangle]
pub unsafe extern "C" fn omd_solve(
    problem: *const OmdProblem,
    config: *const OmdSolverConfig,
    preference: *const f64,
    m: usize,
    out_result: *mut *mut OmdResult,
) -> OmdStatus {
    guard(|| {
        let p = handle(problem, "problem")?;
        let c = *handle(config, "config")?;
        let slot = out(out_result, "out_result")?;
        let w = PreferenceVector::new(slice(preference, m, "preference")?.to_vec())?;
        let mut sc = SolverConfig::new(c.method.into(), w);
        sc.rounds = c.rounds;
        sc.eta_theta = c.eta_theta;
        sc.eta_lambda = c.eta_lambda;
        sc.mu = c.mu;
        sc.seed = c.seed;
        sc.init_scale = c.init_scale;
        sc.theta_box = (c.theta_box > 0.0).then_some(c.theta_box);
        *slot = Box::into_raw(Box::new(OmdResult(run(p.0.as_ref(), &sc)?)));
        Ok(())
    })
}

/// # Safety
/// `result` must come from `omd_solve` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn omd_result_free(result: *mut OmdResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// Number of recorded rounds.
///
/// # Safety
/// `result` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn omd_result_rounds(result: *const OmdResult, out_rounds: *mut usize) -> OmdStatus {
    guard(|| {
        *out(out_rounds, "out_rounds")? = handle(result, "result")?.0.trace.len();
        Ok(())
    })
}

/// Output solution (θ̃ for adaptive methods, θ̄ otherwise) and its objectives.
///
/// # Safety
/// `out_theta[0..d]` and `out_f[0..m]` must be writable.
#[no_mangle]
pub unsafe extern "C" fn omd_result_output(
    result: *const OmdResult,
    out_theta: *mut f64,
    d: usize,
    out_f: *mut f64,
    m: usize,
) -> OmdStatus {
    guard(|| {
        let (theta, f) = handle(result, "result")?.0.output();
        copy_into(slice_mut(out_theta, d, "out_theta")?, theta.as_slice(), "out_theta")?;
        copy_into(slice_mut(out_f, m, "out_f")?, f.as_slice(), "out_f")
    })
}

/// Objectives and combination weights recorded in round `round` (1-based).
///
/// # Safety
/// `out_f[0..m]` and `out_lambda[0..m]` must be writable.
#[no_mangle]
pub unsafe extern "C" fn omd_result_trace_row(
    result: *const OmdResult,
    round: usize,
    out_f: *mut f64,
    out_lambda: *mut f64,
    m: usize,
) -> OmdStatus {
    guard(|| {
        let trace = &handle(result, "result")?.0.trace;
        let rec = round
            .checked_sub(1)
            .and_then(|i| trace.get(i))
            .ok_or_else(|| MooError::Validation(format!("round {round} outside 1..={}", trace.len())))?;
        copy_into(slice_mut(out_f, m, "out_f")?, &rec.objectives, "out_f")?;
        copy_into(slice_mut(out_lambda, m, "out_lambda")?, &rec.lambda, "out_lambda")
    })
}

/// # Safety
/// `out_archive` must be writable.
#[no_mangle]
pub unsafe extern "C" fn omd_archive_new(merge_duplicates: bool, out_archive: *mut *mut OmdArchive) -> OmdStatus {
    guard(|| {
        *out(out_archive, "out_archive")? =
            Box::into_raw(Box::new(OmdArchive(ParetoArchive::with_duplicate_merging(merge_duplicates))));
        Ok(())
    })
}

/// # Safety
/// `archive` must come from `omd_archive_new` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn omd_archive_free(archive: *mut OmdArchive) {
    if !archive.is_null() {
        drop(Box::from_raw(archive));
    }
}

/// Inserts the iterate of `round`. `out_added` is set to 1 when the candidate
/// entered the archive (or was merged into an equal member), 0 when discarded.
///
/// # Safety
/// Arrays must hold the given number of elements; `out_added` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn omd_archive_insert(
    archive: *mut OmdArchive,
    round: u64,
    theta: *const f64,
    d: usize,
    objectives: *const f64,
    m: usize,
    out_added: *mut i32,
) -> OmdStatus {
    guard(|| {
        let a = archive.as_mut().ok_or(Fail::Null("archive"))?;
        let outcome = a.0.insert(
            round,
            DecisionVector::new(slice(theta, d, "theta")?.to_vec())?,
            ObjectiveValues::new(slice(objectives, m, "objectives")?.to_vec())?,
        )?;
        if let Some(flag) = out_added.as_mut() {
            *flag = i32::from(!matches!(outcome, InsertOutcome::Discarded { .. }));
        }
        Ok(())
    })
}

/// # Safety
/// `archive` must be a live handle; out pointers writable.
#[no_mangle]
pub unsafe extern "C" fn omd_archive_stats(
    archive: *const OmdArchive,
    out_len: *mut usize,
    out_total_weight: *mut f64,
) -> OmdStatus {
    guard(|| {
        let a = handle(archive, "archive")?;
        *out(out_len, "out_len")? = a.0.len();
        *out(out_total_weight, "out_total_weight")? = a.0.total_weight();
        Ok(())
    })
}

/// Weighted average of the archived decisions.
///
/// # Safety
/// `out_theta[0..d]` must be writable.
#[no_mangle]
pub unsafe extern "C" fn omd_archive_output(archive: *const OmdArchive, out_theta: *mut f64, d: usize) -> OmdStatus {
    guard(|| {
        let theta = handle(archive, "archive")?.0.output()?;
        copy_into(slice_mut(out_theta, d, "out_theta")?, theta.as_slice(), "out_theta")
    })
}

/// Euclidean projection of `v[0..n]` onto the probability simplex.
///
/// # Safety
/// `v` readable and `out[0..n]` writable; they may alias.
#[no_mangle]
pub unsafe extern "C" fn omd_project_simplex(v: *const f64, n: usize, out_w: *mut f64) -> OmdStatus {
    guard(|| {
        let p = project_simplex(slice(v, n, "v")?)?;
        copy_into(slice_mut(out_w, n, "out_w")?, p.as_slice(), "out_w")
    })
}

/// max_i w_i (f_i - z_i); `nadir` may be NULL for the origin.
///
/// # Safety
/// Arrays must hold `m` elements.
#[no_mangle]
pub unsafe extern "C" fn omd_tch_value(
    f: *const f64,
    w: *const f64,
    nadir: *const f64,
    m: usize,
    out_value: *mut f64,
) -> OmdStatus {
    guard(|| {
        let w = PreferenceVector::new(slice(w, m, "w")?.to_vec())?;
        let z = if nadir.is_null() { NadirPoint::zeros(m) } else { NadirPoint::new(slice(nadir, m, "nadir")?.to_vec())? };
        *out(out_value, "out_value")? = tch_value(slice(f, m, "f")?, &w, &z)?;
        Ok(())
    })
}

fn variant(v: OmdBoundVariant) -> BoundVariant {
    match v {
        OmdBoundVariant::PgdPgd => BoundVariant::PgdPgd,
        OmdBoundVariant::PgdEg => BoundVariant::PgdEg,
    }
}

fn constants(c: &OmdBoundConstants) -> BoundConstants {
    BoundConstants { u: c.u, l: c.l, r_theta: c.r_theta, d: c.d, m: c.m, t: c.t }
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn omd_optimal_step_sizes(
    v: OmdBoundVariant,
    c: *const OmdBoundConstants,
    out_eta_theta: *mut f64,
    out_eta_lambda: *mut f64,
) -> OmdStatus {
    guard(|| {
        let (et, el) = optimal_step_sizes(variant(v), &constants(handle(c, "constants")?))?;
        *out(out_eta_theta, "out_eta_theta")? = et;
        *out(out_eta_lambda, "out_eta_lambda")? = el;
        Ok(())
    })
}

/// Expected-value bound; pass `gamma` in (0, 1) for the high-probability
/// bound or a non-positive value to omit that term.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn omd_convergence_bound(
    v: OmdBoundVariant,
    c: *const OmdBoundConstants,
    gamma: f64,
    out_bound: *mut f64,
) -> OmdStatus {
    guard(|| {
        let g = (gamma > 0.0).then_some(gamma);
        *out(out_bound, "out_bound")? = convergence_bound(variant(v), &constants(handle(c, "constants")?), g)?;
        Ok(())
    })
}
