//! C interface to the erpack solver.
//!
//! Objects cross the boundary as opaque handles created and destroyed by
//! this library. Every fallible call returns an [`ErpackStatus`]; the text
//! of the most recent failure on the calling thread is available from
//! [`erpack_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use erpack::io::{ingest_pairs, ingest_theta, IdTable, IngestError};
use erpack::{
    integerize, run_cg, CgConfig, DoiConfig, DoiMode, Instance, InstanceError, PricingConfig, PricingStrategy,
    SolverError,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErpackStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Parse = 4,
    Solver = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErpackDoiMode {
    None = 0,
    Varying = 1,
    Flexible = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErpackPricing {
    Exact = 0,
    Heuristic = 1,
    Hybrid = 2,
}

/// Solver settings. Obtain defaults from [`erpack_config_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErpackConfig {
    pub doi: ErpackDoiMode,
    /// Rungs per observation besides the top one; flexible mode only.
    pub k: u32,
    pub epsilon: f64,
    pub pricing: ErpackPricing,
    /// Columns per pricing sweep.
    pub max_columns: u32,
    pub threads: u32,
    pub seed: u64,
}

/// Pair costs over observations `0..n`, plus their names when read from a
/// file.
pub struct ErpackInstance {
    instance: Instance,
    names: Vec<CString>,
}

/// Outcome of one solve.
pub struct ErpackSolution {
    lp_objective: f64,
    ilp_objective: f64,
    iterations: usize,
    columns: usize,
    labels: Vec<usize>,
    exact: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(ErpackStatus, String);

impl From<IngestError> for Failure {
    fn from(e: IngestError) -> Self {
        let status = match e {
            IngestError::Io { .. } => ErpackStatus::Io,
            _ => ErpackStatus::Parse,
        };
        Failure(status, e.to_string())
    }
}

impl From<InstanceError> for Failure {
    fn from(e: InstanceError) -> Self {
        Failure(ErpackStatus::InvalidArgument, e.to_string())
    }
}

impl From<SolverError> for Failure {
    fn from(e: SolverError) -> Self {
        let status = match e {
            SolverError::Config(_) => ErpackStatus::InvalidArgument,
            _ => ErpackStatus::Solver,
        };
        Failure(status, e.to_string())
    }
}

fn set_error(message: &str) {
    let text = CString::new(message.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(text));
}

fn null(what: &str) -> Failure {
    Failure(ErpackStatus::NullPointer, format!("{what} is null"))
}

/// Runs `body`, turning errors and panics into a status code.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> ErpackStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => ErpackStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(&message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            ErpackStatus::Panic
        }
    }
}

unsafe fn path_arg<'a>(path: *const c_char) -> Result<&'a Path, Failure> {
    if path.is_null() {
        return Err(null("path"));
    }
    CStr::from_ptr(path)
        .to_str()
        .map(Path::new)
        .map_err(|_| Failure(ErpackStatus::InvalidArgument, "path is not valid UTF-8".into()))
}

fn names_of(ids: &IdTable) -> Vec<CString> {
    (0..ids.len())
        .map(|d| CString::new(ids.name(d)).unwrap_or_else(|_| CString::new(d.to_string()).unwrap()))
        .collect()
}

unsafe fn emit<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn erpack_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn erpack_status_message(status: ErpackStatus) -> *const c_char {
    let text: &'static CStr = match status {
        ErpackStatus::Ok => c"ok",
        ErpackStatus::NullPointer => c"null pointer argument",
        ErpackStatus::InvalidArgument => c"invalid argument",
        ErpackStatus::Io => c"i/o error",
        ErpackStatus::Parse => c"parse error",
        ErpackStatus::Solver => c"solver error",
        ErpackStatus::BufferTooSmall => c"buffer too small",
        ErpackStatus::Panic => c"internal panic",
    };
    text.as_ptr()
}

#[no_mangle]
pub extern "C" fn erpack_config_default() -> ErpackConfig {
    let doi = DoiConfig::default();
    let pricing = PricingConfig::default();
    ErpackConfig {
        doi: ErpackDoiMode::Flexible,
        k: doi.k as u32,
        epsilon: doi.epsilon,
        pricing: ErpackPricing::Hybrid,
        max_columns: pricing.max_new_columns as u32,
        threads: pricing.threads as u32,
        seed: pricing.seed,
    }
}

/// Empty instance over `n` observations; every pair starts blocked.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn erpack_instance_new(n: usize, out: *mut *mut ErpackInstance) -> ErpackStatus {
    guard(|| {
        emit(
            out,
            ErpackInstance { instance: Instance::new(n), names: Vec::new() },
        )
    })
}

/// Allows observations `a` and `b` to share a cluster at cost `theta`.
///
/// # Safety
/// `instance` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn erpack_instance_add_pair(
    instance: *mut ErpackInstance,
    a: usize,
    b: usize,
    theta: f64,
) -> ErpackStatus {
    guard(|| {
        let inst = instance.as_mut().ok_or_else(|| null("instance"))?;
        inst.instance.insert_pair(a, b, theta)?;
        Ok(())
    })
}

/// Reads `id1,id2,theta` records.
///
/// # Safety
/// `path` must be a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn erpack_instance_read_theta(
    path: *const c_char,
    out: *mut *mut ErpackInstance,
) -> ErpackStatus {
    guard(|| {
        let (instance, ids) = ingest_theta(path_arg(path)?)?;
        emit(out, ErpackInstance { instance, names: names_of(&ids) })
    })
}

/// Reads `id1,id2,p` records with `theta = bias - p`.
///
/// # Safety
/// `path` must be a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn erpack_instance_read_pairs(
    path: *const c_char,
    bias: f64,
    out: *mut *mut ErpackInstance,
) -> ErpackStatus {
    guard(|| {
        let (instance, ids) = ingest_pairs(path_arg(path)?, bias)?;
        emit(out, ErpackInstance { instance, names: names_of(&ids) })
    })
}

/// Number of observations, zero for a null handle.
///
/// # Safety
/// `instance` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn erpack_instance_len(instance: *const ErpackInstance) -> usize {
    instance.as_ref().map_or(0, |i| i.instance.n_observations())
}

/// External id of observation `d` for file-backed instances, null
/// otherwise. Owned by the instance.
///
/// # Safety
/// `instance` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn erpack_instance_name(instance: *const ErpackInstance, d: usize) -> *const c_char {
    instance
        .as_ref()
        .and_then(|i| i.names.get(d))
        .map_or(ptr::null(), |s| s.as_ptr())
}

/// # Safety
/// `instance` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn erpack_instance_free(instance: *mut ErpackInstance) {
    if !instance.is_null() {
        drop(Box::from_raw(instance));
    }
}

fn cg_config(c: &ErpackConfig) -> Result<CgConfig, Failure> {
    let mode = match c.doi {
        ErpackDoiMode::None => DoiMode::None,
        ErpackDoiMode::Varying => DoiMode::Varying,
        ErpackDoiMode::Flexible => DoiMode::Flexible,
    };
    let strategy = match c.pricing {
        ErpackPricing::Exact => PricingStrategy::Exact,
        ErpackPricing::Heuristic => PricingStrategy::Heuristic,
        ErpackPricing::Hybrid => PricingStrategy::Hybrid,
    };
    let mut doi = DoiConfig::new(mode).with_k(c.k as usize);
    doi.epsilon = c.epsilon;
    let pricing = PricingConfig {
        strategy,
        max_new_columns: c.max_columns as usize,
        threads: c.threads as usize,
        seed: c.seed,
        ..Default::default()
    };
    let cfg = CgConfig::new(doi, pricing);
    cfg.validate()?;
    Ok(cfg)
}

/// Column generation followed by integerization. A null `config` means
/// the defaults.
///
/// # Safety
/// `instance` must be a live handle, `config` null or valid, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn erpack_solve(
    instance: *const ErpackInstance,
    config: *const ErpackConfig,
    out: *mut *mut ErpackSolution,
) -> ErpackStatus {
    guard(|| {
        let inst = &instance.as_ref().ok_or_else(|| null("instance"))?.instance;
        let cfg = cg_config(&config.as_ref().copied().unwrap_or_else(|| erpack_config_default()))?;
        let cg = run_cg(inst, &cfg)?;
        let int = integerize(inst, &cg.pool, &cfg.doi)?;
        emit(
            out,
            ErpackSolution {
                lp_objective: cg.lp_objective,
                ilp_objective: int.clustering.total_cost,
                iterations: cg.iterations,
                columns: cg.columns_generated,
                labels: int.clustering.labels(),
                exact: cg.exact,
            },
        )
    })
}

/// Column generation bound; NaN for a null handle.
///
/// # Safety
/// `solution` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn erpack_solution_lp_objective(solution: *const ErpackSolution) -> f64 {
    solution.as_ref().map_or(f64::NAN, |s| s.lp_objective)
}

/// Total cost of the returned clustering; NaN for a null handle.
///
/// # Safety
/// `solution` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn erpack_solution_ilp_objective(solution: *const ErpackSolution) -> f64 {
    solution.as_ref().map_or(f64::NAN, |s| s.ilp_objective)
}

/// # Safety
/// `solution` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn erpack_solution_iterations(solution: *const ErpackSolution) -> usize {
    solution.as_ref().map_or(0, |s| s.iterations)
}

/// # Safety
/// `solution` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn erpack_solution_columns(solution: *const ErpackSolution) -> usize {
    solution.as_ref().map_or(0, |s| s.columns)
}

/// Whether the last pricing pass proved the bound.
///
/// # Safety
/// `solution` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn erpack_solution_exact(solution: *const ErpackSolution) -> bool {
    solution.as_ref().is_some_and(|s| s.exact)
}

/// Copies one cluster label per observation into `labels`. On
/// `BufferTooSmall`, `*written` holds the required length.
///
/// # Safety
/// `labels` must point to `capacity` writable elements, `written` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn erpack_solution_labels(
    solution: *const ErpackSolution,
    labels: *mut usize,
    capacity: usize,
    written: *mut usize,
) -> ErpackStatus {
    guard(|| {
        let sol = solution.as_ref().ok_or_else(|| null("solution"))?;
        let written = written.as_mut().ok_or_else(|| null("written"))?;
        *written = sol.labels.len();
        if capacity < sol.labels.len() {
            return Err(Failure(
                ErpackStatus::BufferTooSmall,
                format!("{} labels do not fit in {capacity}", sol.labels.len()),
            ));
        }
        if sol.labels.is_empty() {
            return Ok(());
        }
        if labels.is_null() {
            return Err(null("labels"));
        }
        ptr::copy_nonoverlapping(sol.labels.as_ptr(), labels, sol.labels.len());
        Ok(())
    })
}

/// # Safety
/// `solution` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn erpack_solution_free(solution: *mut ErpackSolution) {
    if !solution.is_null() {
        drop(Box::from_raw(solution));
    }
}
