use std::ffi::{CStr, CString};
use std::process::Command;
use std::ptr;

use ctrlmod_ffi::*;
use serde_json::Value;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = ctrlmod_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

fn parse(json: &str) -> (CtrlmodStatus, *mut CtrlmodTask) {
    let mut task = ptr::null_mut();
    let status = unsafe { ctrlmod_task_parse(cstr(json).as_ptr(), ptr::null(), &mut task) };
    (status, task)
}

#[test]
fn version_is_the_crate_version() {
    let v = unsafe { CStr::from_ptr(ctrlmod_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn run_a_task_end_to_end() {
    let (status, task) = parse(r#"{"command":"resolve","module":"modules/z2-trivial.json","window":5}"#);
    assert_eq!(status, CtrlmodStatus::Ok);
    let mut report = ptr::null_mut();
    assert_eq!(unsafe { ctrlmod_task_run(task, &mut report) }, CtrlmodStatus::Ok);
    assert_eq!(unsafe { ctrlmod_report_passed(report) }, 1);
    let json: Value = serde_json::from_str(unsafe { CStr::from_ptr(ctrlmod_report_json(report)) }.to_str().unwrap()).unwrap();
    assert_eq!(json["result"]["ranks"], serde_json::json!([1, 2, 1]));
    let chain = unsafe { ctrlmod_report_chain(report) };
    assert!(!chain.is_null());
    unsafe {
        ctrlmod_string_free(chain);
        ctrlmod_report_free(report);
        ctrlmod_task_free(task);
    }
}

#[test]
fn failing_property_is_not_an_error() {
    let (status, task) = parse(r#"{"command":"insular-check","module":"modules/z-trivial.json","constant":2,"window":10}"#);
    assert_eq!(status, CtrlmodStatus::Ok);
    assert_eq!(unsafe { ctrlmod_task_set_seed(task, 7) }, CtrlmodStatus::Ok);
    let mut report = ptr::null_mut();
    assert_eq!(unsafe { ctrlmod_task_run(task, &mut report) }, CtrlmodStatus::Ok);
    assert_eq!(unsafe { ctrlmod_report_passed(report) }, 0);
    assert!(unsafe { ctrlmod_report_chain(report) }.is_null());
    unsafe {
        ctrlmod_report_free(report);
        ctrlmod_task_free(task);
    }
}

#[test]
fn error_codes_and_messages() {
    let (status, task) = parse("{not json");
    assert_eq!(status, CtrlmodStatus::InvalidTask);
    assert!(task.is_null());
    assert!(last_error().contains("line 1"));

    let (status, _) = parse(r#"{"command":"lean-check","module":"no/such/module.json"}"#);
    assert_eq!(status, CtrlmodStatus::Io);

    let mut out = ptr::null_mut();
    assert_eq!(unsafe { ctrlmod_task_parse(ptr::null(), ptr::null(), &mut out) }, CtrlmodStatus::InvalidArgument);
    assert_eq!(unsafe { ctrlmod_task_run(ptr::null(), &mut ptr::null_mut()) }, CtrlmodStatus::InvalidArgument);

    let (status, task) = parse(r#"{"command":"insular-check","module":"modules/z-trivial.json","constant":3}"#);
    assert_eq!(status, CtrlmodStatus::Ok);
    assert_eq!(unsafe { ctrlmod_task_set_window(task, 2) }, CtrlmodStatus::InvalidTask);
    assert!(last_error().contains("constant exceeds window"));
    unsafe { ctrlmod_task_free(task) };

    let mut n = 0u64;
    assert_eq!(unsafe { ctrlmod_ball_size(cstr("F2").as_ptr(), 4, &mut n) }, CtrlmodStatus::Ok);
    assert_eq!(n, 161);
    assert!(ctrlmod_last_error().is_null());
    assert_eq!(unsafe { ctrlmod_ball_size(cstr("G7").as_ptr(), 1, &mut n) }, CtrlmodStatus::InvalidTask);
}

#[test]
fn header_compiles_as_c_and_cpp() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/ctrlmod.h");
    let text = std::fs::read_to_string(header).unwrap();
    for f in ["ctrlmod_task_parse", "ctrlmod_task_run", "ctrlmod_report_json", "ctrlmod_last_error", "ctrlmod_string_free"] {
        assert!(text.contains(f), "{f} missing from header");
    }
    let dir = tempfile::tempdir().unwrap();
    for (cc, ext) in [("cc", "c"), ("c++", "cpp")] {
        let src = dir.path().join(format!("probe.{ext}"));
        std::fs::write(&src, format!("#include \"{header}\"\nint main(void) {{ return ctrlmod_version() == 0; }}\n")).unwrap();
        match Command::new(cc).arg("-fsyntax-only").arg(&src).status() {
            Ok(s) => assert!(s.success(), "{cc} rejected the header"),
            Err(_) => eprintln!("{cc} not available; skipping"),
        }
    }
}
