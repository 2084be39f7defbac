//! C ABI over the `mrdrrt` planner.
//!
//! Scenarios and plans are opaque handles created and destroyed by this
//! library. Every fallible call returns an [`MrdrrtStatus`]; on failure a
//! description is available from [`mrdrrt_last_error`] on the same thread.
//! Strings returned by the library are owned by the caller and released
//! with [`mrdrrt_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::time::Duration;

use mrdrrt::plan_io::{validate_plan, PlanFile};
use mrdrrt::planner::{plan_with_roadmaps, PlannerOptions, RunReport};
use mrdrrt::render::render_svg;
use mrdrrt::{scenarios, Error, PrmConfig, ProductMode, Roadmap, Scenario};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MrdrrtStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    /// Malformed JSON, invalid scenario, plan or roadmap.
    InvalidInput = 3,
    /// A roadmap could not be built (collision or disconnection).
    RoadmapFailed = 4,
    /// The search ended without a valid path. The plan handle is still
    /// produced and carries the run report.
    PlanFailed = 5,
    Io = 6,
    NotFound = 7,
    Panic = 8,
}

/// Planner settings. Obtain defaults from [`mrdrrt_options_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct MrdrrtOptions {
    pub seed: u64,
    pub prm_n: usize,
    pub prm_k: usize,
    pub prm_batches: usize,
    pub max_iterations: usize,
    /// Cartesian product instead of the tensor product.
    pub cartesian: bool,
    pub fallback: bool,
    /// 0 disables the budget.
    pub time_budget_ms: u64,
}

/// A scenario and, once built, its roadmaps.
pub struct MrdrrtScenario {
    scenario: Scenario,
    roadmaps: Option<Vec<Roadmap>>,
}

/// Result of a planning run.
pub struct MrdrrtPlan {
    plan: Option<PlanFile>,
    report: RunReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> MrdrrtStatus {
    match e {
        Error::RoadmapDisconnected { .. } | Error::SamplingExhausted { .. } | Error::ConfigurationInCollision { .. } => {
            MrdrrtStatus::RoadmapFailed
        }
        Error::Io(_) => MrdrrtStatus::Io,
        _ => MrdrrtStatus::InvalidInput,
    }
}

fn fail(e: Error) -> MrdrrtStatus {
    let s = status_of(&e);
    set_error(e.to_string());
    s
}

fn guard(f: impl FnOnce() -> MrdrrtStatus) -> MrdrrtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("internal panic".into());
            MrdrrtStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, MrdrrtStatus> {
    if p.is_null() {
        set_error("null string argument".into());
        return Err(MrdrrtStatus::NullArgument);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("string argument is not UTF-8".into());
        MrdrrtStatus::InvalidUtf8
    })
}

fn out_string(s: String) -> *mut c_char {
    CString::new(s).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

fn planner_options(o: &MrdrrtOptions) -> PlannerOptions {
    PlannerOptions {
        prm: PrmConfig { n: o.prm_n, k: o.prm_k, max_batches: o.prm_batches, seed: o.seed },
        seed: o.seed,
        max_iterations: o.max_iterations,
        mode: if o.cartesian { ProductMode::Cartesian } else { ProductMode::Tensor },
        fallback: o.fallback,
        time_budget: (o.time_budget_ms > 0).then(|| Duration::from_millis(o.time_budget_ms)),
        ..Default::default()
    }
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn mrdrrt_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version, static storage.
#[no_mangle]
pub extern "C" fn mrdrrt_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

#[no_mangle]
pub extern "C" fn mrdrrt_options_default() -> MrdrrtOptions {
    let d = PlannerOptions::default();
    MrdrrtOptions {
        seed: d.seed,
        prm_n: d.prm.n,
        prm_k: d.prm.k,
        prm_batches: d.prm.max_batches,
        max_iterations: d.max_iterations,
        cartesian: false,
        fallback: d.fallback,
        time_budget_ms: d.time_budget.map_or(0, |b| b.as_millis() as u64),
    }
}

unsafe fn put_scenario(scenario: Scenario, out: *mut *mut MrdrrtScenario) -> MrdrrtStatus {
    *out = Box::into_raw(Box::new(MrdrrtScenario { scenario, roadmaps: None }));
    MrdrrtStatus::Ok
}

/// Parses and validates a scenario from JSON.
///
/// # Safety
/// `json` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mrdrrt_scenario_from_json(json: *const c_char, out: *mut *mut MrdrrtScenario) -> MrdrrtStatus {
    guard(|| {
        if out.is_null() {
            set_error("null output pointer".into());
            return MrdrrtStatus::NullArgument;
        }
        let text = match str_arg(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match Scenario::from_json(text) {
            Ok(sc) => put_scenario(sc, out),
            Err(e) => fail(e),
        }
    })
}

/// Loads a scenario from a JSON file.
///
/// # Safety
/// `path` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mrdrrt_scenario_load(path: *const c_char, out: *mut *mut MrdrrtScenario) -> MrdrrtStatus {
    guard(|| {
        if out.is_null() {
            set_error("null output pointer".into());
            return MrdrrtStatus::NullArgument;
        }
        let path = match str_arg(path) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match Scenario::load(path) {
            Ok(sc) => put_scenario(sc, out),
            Err(e) => fail(e),
        }
    })
}

/// One of the bundled scenarios by name.
///
/// # Safety
/// `name` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mrdrrt_scenario_bundled(name: *const c_char, out: *mut *mut MrdrrtScenario) -> MrdrrtStatus {
    guard(|| {
        if out.is_null() {
            set_error("null output pointer".into());
            return MrdrrtStatus::NullArgument;
        }
        let name = match str_arg(name) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match scenarios::by_name(name) {
            Some(sc) => put_scenario(sc, out),
            None => {
                set_error(format!("no bundled scenario named {name:?}"));
                MrdrrtStatus::NotFound
            }
        }
    })
}

/// # Safety
/// `scenario` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mrdrrt_scenario_free(scenario: *mut MrdrrtScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Number of robots, or 0 for a null handle.
///
/// # Safety
/// `scenario` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mrdrrt_scenario_robot_count(scenario: *const MrdrrtScenario) -> usize {
    scenario.as_ref().map_or(0, |s| s.scenario.robots.len())
}

/// Scenario as JSON; free with [`mrdrrt_string_free`]. Null on failure.
///
/// # Safety
/// `scenario` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mrdrrt_scenario_to_json(scenario: *const MrdrrtScenario) -> *mut c_char {
    match scenario.as_ref().map(|s| s.scenario.to_json()) {
        Some(Ok(j)) => out_string(j),
        Some(Err(e)) => {
            set_error(e.to_string());
            ptr::null_mut()
        }
        None => {
            set_error("null scenario".into());
            ptr::null_mut()
        }
    }
}

/// Builds (or rebuilds) the per-robot roadmaps held by the handle.
///
/// # Safety
/// `scenario` must be a live handle and `options` null or valid; null
/// options means defaults.
#[no_mangle]
pub unsafe extern "C" fn mrdrrt_build_roadmaps(scenario: *mut MrdrrtScenario, options: *const MrdrrtOptions) -> MrdrrtStatus {
    guard(|| {
        let Some(h) = scenario.as_mut() else {
            set_error("null scenario".into());
            return MrdrrtStatus::NullArgument;
        };
        let opts = planner_options(&options.as_ref().copied().unwrap_or_else(|| mrdrrt_options_default()));
        match h.scenario.build_roadmaps(&opts.prm_config()) {
            Ok(maps) => {
                h.roadmaps = Some(maps);
                MrdrrtStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Roadmap of one robot as JSON, or null if roadmaps are not built.
///
/// # Safety
/// `scenario` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mrdrrt_roadmap_to_json(scenario: *const MrdrrtScenario, robot: usize) -> *mut c_char {
    let map = scenario.as_ref().and_then(|s| s.roadmaps.as_ref()).and_then(|m| m.get(robot));
    match map.map(Roadmap::to_json) {
        Some(Ok(j)) => out_string(j),
        _ => {
            set_error(format!("no roadmap for robot {robot}"));
            ptr::null_mut()
        }
    }
}

/// Plans with the handle's roadmaps, building them first if needed. On
/// `Ok` and on `PlanFailed`, `*out` receives a plan handle.
///
/// # Safety
/// `scenario` must be a live handle, `options` null or valid, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn mrdrrt_plan(
    scenario: *mut MrdrrtScenario,
    options: *const MrdrrtOptions,
    out: *mut *mut MrdrrtPlan,
) -> MrdrrtStatus {
    guard(|| {
        if out.is_null() {
            set_error("null output pointer".into());
            return MrdrrtStatus::NullArgument;
        }
        let Some(h) = scenario.as_mut() else {
            set_error("null scenario".into());
            return MrdrrtStatus::NullArgument;
        };
        let opts = planner_options(&options.as_ref().copied().unwrap_or_else(|| mrdrrt_options_default()));
        if h.roadmaps.is_none() {
            match h.scenario.build_roadmaps(&opts.prm_config()) {
                Ok(maps) => h.roadmaps = Some(maps),
                Err(e) => return fail(e),
            }
        }
        let maps = h.roadmaps.as_deref().unwrap_or_default();
        let run = match plan_with_roadmaps(&h.scenario, maps, &opts) {
            Ok(r) => r,
            Err(e) => return fail(e),
        };
        let plan = run.path.as_ref().map(|p| PlanFile::from_path(&h.scenario.name, opts.seed, maps, p));
        let status = if plan.is_some() {
            MrdrrtStatus::Ok
        } else {
            set_error(format!("planning failed: {:?}", run.report.failure));
            MrdrrtStatus::PlanFailed
        };
        *out = Box::into_raw(Box::new(MrdrrtPlan { plan, report: run.report }));
        status
    })
}

/// # Safety
/// `plan` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mrdrrt_plan_free(plan: *mut MrdrrtPlan) {
    if !plan.is_null() {
        drop(Box::from_raw(plan));
    }
}

/// # Safety
/// `plan` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mrdrrt_plan_succeeded(plan: *const MrdrrtPlan) -> bool {
    plan.as_ref().is_some_and(|p| p.plan.is_some())
}

/// Number of steps, or 0 for a null or failed plan.
///
/// # Safety
/// `plan` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mrdrrt_plan_step_count(plan: *const MrdrrtPlan) -> usize {
    plan.as_ref().and_then(|p| p.plan.as_ref()).map_or(0, |p| p.steps.len())
}

/// Plan JSON, or null for a failed plan.
///
/// # Safety
/// `plan` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mrdrrt_plan_to_json(plan: *const MrdrrtPlan) -> *mut c_char {
    match plan.as_ref().and_then(|p| p.plan.as_ref()).map(PlanFile::to_json) {
        Some(Ok(j)) => out_string(j),
        _ => {
            set_error("no plan".into());
            ptr::null_mut()
        }
    }
}

/// Run report JSON.
///
/// # Safety
/// `plan` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mrdrrt_plan_report_json(plan: *const MrdrrtPlan) -> *mut c_char {
    match plan.as_ref().map(|p| p.report.to_json()) {
        Some(Ok(j)) => out_string(j),
        _ => {
            set_error("null plan".into());
            ptr::null_mut()
        }
    }
}

/// Validates plan JSON against the handle's scenario and roadmaps. Sets
/// `*valid` and, if `report` is not null, `*report` to the violation report
/// JSON (caller frees).
///
/// # Safety
/// `scenario` must be a live handle with roadmaps built, `plan_json` a
/// valid C string, `valid` a valid pointer and `report` null or valid.
#[no_mangle]
pub unsafe extern "C" fn mrdrrt_validate_plan(
    scenario: *const MrdrrtScenario,
    plan_json: *const c_char,
    valid: *mut bool,
    report: *mut *mut c_char,
) -> MrdrrtStatus {
    guard(|| {
        if valid.is_null() {
            set_error("null output pointer".into());
            return MrdrrtStatus::NullArgument;
        }
        let Some(h) = scenario.as_ref() else {
            set_error("null scenario".into());
            return MrdrrtStatus::NullArgument;
        };
        let Some(maps) = h.roadmaps.as_ref() else {
            set_error("roadmaps not built".into());
            return MrdrrtStatus::InvalidInput;
        };
        let text = match str_arg(plan_json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let plan = match PlanFile::from_json(text) {
            Ok(p) => p,
            Err(e) => return fail(e),
        };
        let r = validate_plan(&h.scenario, maps, &plan);
        *valid = r.ok;
        if !report.is_null() {
            *report = match r.to_json() {
                Ok(j) => out_string(j),
                Err(e) => return fail(e),
            };
        }
        MrdrrtStatus::Ok
    })
}

/// SVG drawing of the scenario with an optional plan overlay.
///
/// # Safety
/// `scenario` must be a live handle and `plan` null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mrdrrt_render_svg(scenario: *const MrdrrtScenario, plan: *const MrdrrtPlan) -> *mut c_char {
    let Some(h) = scenario.as_ref() else {
        set_error("null scenario".into());
        return ptr::null_mut();
    };
    let plan = plan.as_ref().and_then(|p| p.plan.as_ref());
    out_string(render_svg(&h.scenario, plan))
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be null or a string from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mrdrrt_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
