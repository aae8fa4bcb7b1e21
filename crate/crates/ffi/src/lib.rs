//! C ABI over the task runner.
//!
//! Tasks go in as JSON text and reports come out as JSON text. Handles are opaque and
//! owned by the caller until passed to the matching `_free` function. Every entry
//! point returns a [`CtrlmodStatus`]; on failure [`ctrlmod_last_error`] describes it.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use ctrlmod::cli::{run, Report, TaskSpec};
use ctrlmod::error::Error;
use ctrlmod::space::{ball_elements, GroupSpec};

/// Status codes shared by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CtrlmodStatus {
    Ok = 0,
    /// A null pointer or non-UTF-8 string was passed.
    InvalidArgument = 1,
    /// The task text is malformed, violates the schema or an invariant.
    InvalidTask = 2,
    /// A referenced file could not be read.
    Io = 3,
    /// The computation was rejected, e.g. a window too small or an unsupported family.
    Computation = 4,
    /// A Rust panic was caught at the boundary.
    Internal = 5,
}

/// A parsed, fully resolved task.
pub struct CtrlmodTask {
    inner: TaskSpec,
}

/// The outcome of running a task.
pub struct CtrlmodReport {
    inner: Report,
    json: CString,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = CString::new(msg.into().replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(text));
}

fn status_of(e: &Error) -> CtrlmodStatus {
    match e {
        Error::InvalidTask(_)
        | Error::MalformedGroup(_)
        | Error::MalformedRing(_)
        | Error::MalformedScalar(_)
        | Error::MalformedWord(_)
        | Error::UnknownGenerator(_) => CtrlmodStatus::InvalidTask,
        Error::Io(_) => CtrlmodStatus::Io,
        _ => CtrlmodStatus::Computation,
    }
}

fn guard(f: impl FnOnce() -> Result<(), CtrlmodStatus>) -> CtrlmodStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CtrlmodStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            CtrlmodStatus::Internal
        }
    }
}

fn fail(e: Error) -> CtrlmodStatus {
    set_error(e.to_string());
    status_of(&e)
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, CtrlmodStatus> {
    if p.is_null() {
        return Err(null_arg(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error(format!("{what} is not UTF-8"));
        CtrlmodStatus::InvalidArgument
    })
}

fn null_arg(what: &str) -> CtrlmodStatus {
    set_error(format!("{what} is null"));
    CtrlmodStatus::InvalidArgument
}

fn check_out<T>(out: *mut T) -> Result<(), CtrlmodStatus> {
    if out.is_null() {
        return Err(null_arg("output pointer"));
    }
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ctrlmod_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failing call on this thread, or null. Valid until the next call.
#[no_mangle]
pub extern "C" fn ctrlmod_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Parses task JSON. Relative module paths resolve against `base_dir` (may be null),
/// then the corpus root.
///
/// # Safety
/// `json` and `base_dir` must be null or valid NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ctrlmod_task_parse(json: *const c_char, base_dir: *const c_char, out: *mut *mut CtrlmodTask) -> CtrlmodStatus {
    guard(|| {
        check_out(out)?;
        let text = read_str(json, "json")?;
        let base = if base_dir.is_null() { None } else { Some(read_str(base_dir, "base_dir")?) };
        let task = TaskSpec::from_json_str(text, base.map(Path::new)).map_err(fail)?;
        *out = Box::into_raw(Box::new(CtrlmodTask { inner: task }));
        Ok(())
    })
}

/// Overrides the window radius; rejected when a constant would exceed it.
///
/// # Safety
/// `task` must come from [`ctrlmod_task_parse`].
#[no_mangle]
pub unsafe extern "C" fn ctrlmod_task_set_window(task: *mut CtrlmodTask, window: u32) -> CtrlmodStatus {
    guard(|| {
        let t = task.as_mut().ok_or_else(|| null_arg("task"))?;
        let mut next = t.inner.clone();
        next.window = Some(window);
        next.validate().map_err(fail)?;
        t.inner = next;
        Ok(())
    })
}

/// Overrides the sampling seed.
///
/// # Safety
/// `task` must come from [`ctrlmod_task_parse`].
#[no_mangle]
pub unsafe extern "C" fn ctrlmod_task_set_seed(task: *mut CtrlmodTask, seed: u64) -> CtrlmodStatus {
    guard(|| {
        let t = task.as_mut().ok_or_else(|| null_arg("task"))?;
        t.inner.seed = seed;
        Ok(())
    })
}

/// # Safety
/// `task` must be null or come from [`ctrlmod_task_parse`], and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ctrlmod_task_free(task: *mut CtrlmodTask) {
    if !task.is_null() {
        drop(Box::from_raw(task));
    }
}

/// Runs a task. A failed property still returns `Ok`; see [`ctrlmod_report_passed`].
///
/// # Safety
/// `task` must come from [`ctrlmod_task_parse`]; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ctrlmod_task_run(task: *const CtrlmodTask, out: *mut *mut CtrlmodReport) -> CtrlmodStatus {
    guard(|| {
        check_out(out)?;
        let t = task.as_ref().ok_or_else(|| null_arg("task"))?;
        let report = run(&t.inner, false).map_err(fail)?;
        let json = CString::new(report.to_pretty()).expect("JSON has no NUL");
        *out = Box::into_raw(Box::new(CtrlmodReport { inner: report, json }));
        Ok(())
    })
}

/// 1 when every certificate passed, 0 otherwise (also for null).
///
/// # Safety
/// `report` must be null or come from [`ctrlmod_task_run`].
#[no_mangle]
pub unsafe extern "C" fn ctrlmod_report_passed(report: *const CtrlmodReport) -> i32 {
    report.as_ref().map_or(0, |r| r.inner.verdict as i32)
}

/// Report JSON, owned by the report.
///
/// # Safety
/// `report` must be null or come from [`ctrlmod_task_run`].
#[no_mangle]
pub unsafe extern "C" fn ctrlmod_report_json(report: *const CtrlmodReport) -> *const c_char {
    report.as_ref().map_or(ptr::null(), |r| r.json.as_ptr())
}

/// The resolution chain of a resolve task as a fresh string, or null. Free it with
/// [`ctrlmod_string_free`].
///
/// # Safety
/// `report` must be null or come from [`ctrlmod_task_run`].
#[no_mangle]
pub unsafe extern "C" fn ctrlmod_report_chain(report: *const CtrlmodReport) -> *mut c_char {
    report
        .as_ref()
        .and_then(|r| r.inner.chain.as_ref())
        .map_or(ptr::null_mut(), |c| CString::new(c.to_string()).expect("JSON has no NUL").into_raw())
}

/// # Safety
/// `report` must be null or come from [`ctrlmod_task_run`], and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ctrlmod_report_free(report: *mut CtrlmodReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// # Safety
/// `s` must be null or a string returned by this library for the caller to free.
#[no_mangle]
pub unsafe extern "C" fn ctrlmod_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Number of elements of the ball of radius `r` about the identity.
///
/// # Safety
/// `group` must be a valid NUL-terminated string such as `"F2"`; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ctrlmod_ball_size(group: *const c_char, r: u32, out: *mut u64) -> CtrlmodStatus {
    guard(|| {
        check_out(out)?;
        let spec: GroupSpec = read_str(group, "group")?.parse().map_err(fail)?;
        let pts = ball_elements(&spec, &spec.identity(), r).map_err(fail)?;
        *out = pts.len() as u64;
        Ok(())
    })
}
