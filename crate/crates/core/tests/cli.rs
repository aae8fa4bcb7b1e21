use std::path::{Path, PathBuf};
use std::process::Command as Proc;

use ctrlmod::cli::{corpus_manifest, corpus_root, parse_spec, run, Command, ModuleSource, TaskSpec, Tier};
use ctrlmod::error::Error;
use ctrlmod::filtered::{FilteredModule, PresentedModule};
use ctrlmod::ring::vector::vector_from_json;
use ctrlmod::ring::GroupRing;
use ctrlmod::space::GroupSpec;
use serde_json::{json, Value};

fn corpus(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus/v1").join(rel)
}

fn task(v: Value) -> ctrlmod::error::Result<TaskSpec> {
    TaskSpec::from_json_str(&v.to_string(), Some(&corpus("tasks")))
}

#[test]
fn minimal_ball_task_gets_seed_zero() {
    let t = task(json!({"command": "ball", "group": "F2", "r": 3})).unwrap();
    assert_eq!(t.command, Command::Ball);
    assert_eq!(t.seed, 0);
    assert_eq!(t.window, None);
    let rep = run(&t, false).unwrap();
    assert_eq!(rep.result["size"], 53);
}

#[test]
fn constant_above_window_is_rejected() {
    let err = task(json!({"command": "insular-check", "module": "../modules/z-trivial.json", "constant": 5, "window": 4})).unwrap_err();
    assert!(err.to_string().contains("constant exceeds window"), "{err}");
}

#[test]
fn tier_is_inferred_for_resolve() {
    let t = task(json!({"command": "resolve", "module": "../modules/z2-trivial.json"})).unwrap();
    assert_eq!(t.tier, Some(Tier::A));
    let b = task(json!({"command": "resolve", "module": "../modules/f2-trivial.json"})).unwrap();
    assert_eq!(b.tier, Some(Tier::B));
    assert!(task(json!({"command": "resolve", "module": "../modules/f2-trivial.json", "tier": "A"})).is_err());
}

#[test]
fn unknown_keys_and_syntax_errors_are_diagnosed() {
    let err = task(json!({"command": "ball", "group": "F2", "r": 3, "radius": 2})).unwrap_err();
    assert!(err.to_string().contains("unknown field `radius`"), "{err}");
    let err = TaskSpec::from_json_str("{\"command\": \"ball\",\n \"r\": }", None).unwrap_err();
    assert!(err.to_string().contains("line 2"), "{err}");
    assert!(matches!(parse_spec(Path::new("/nonexistent/task.json")), Err(Error::Io(_))));
    assert!(task(json!({"command": "ball", "group": "F2"})).is_err());
}

#[test]
fn default_windows_follow_the_group() {
    let w = |m: &str| task(json!({"command": "lean-check", "module": m})).unwrap().window;
    assert_eq!(w("../modules/z-free.json"), Some(20));
    assert_eq!(w("../modules/z2-free.json"), Some(20));
    assert_eq!(w("../modules/f2-free.json"), Some(8));
    assert_eq!(w("../modules/bs-free.json"), Some(6));
}

#[test]
fn modules_resolve_against_the_corpus_root() {
    let t = TaskSpec::from_json_str(&json!({"command": "lean-check", "module": "modules/z-free.json"}).to_string(), None).unwrap();
    assert!(matches!(t.module, Some(ModuleSource::Inline(_))));
}

#[test]
fn zero_lean_report_passes() {
    let t = task(json!({"command": "lean-check", "module": "../modules/z2-line.json", "constant": 0})).unwrap();
    let rep = run(&t, false).unwrap();
    assert!(rep.verdict);
    assert_eq!(rep.exit_code(), 0);
}

#[test]
fn insular_failure_carries_a_confirmed_antipodal_witness() {
    let t = parse_spec(&corpus("tasks/insular-z-trivial.json")).unwrap();
    let rep = run(&t, false).unwrap();
    assert_eq!(rep.exit_code(), 1);
    let cx = &rep.certificates[0]["counterexample"];
    let spec: GroupSpec = "Z".parse().unwrap();
    let s = spec.parse_word(cx["s"][0].as_str().unwrap()).unwrap();
    let u = spec.parse_word(cx["u"][0].as_str().unwrap()).unwrap();
    assert_eq!(u, spec.inverse(&s));

    let module = PresentedModule::from_json(t.module.as_ref().unwrap().value().unwrap()).unwrap();
    let gr = GroupRing::new(spec.clone(), "Z".parse().unwrap());
    let witness = vector_from_json(&spec, &gr.ring, &cx["witness"]).unwrap();
    let win = FilteredModule::standard(module).window(10).unwrap();
    assert!(win.evaluate(&[s.clone()]).unwrap().contains(&witness));
    assert!(win.evaluate(&[u]).unwrap().contains(&witness));
    // S[3] ∩ U[3] is empty for |s| = 7, so the right-hand side is zero.
    assert!(spec.length(&s).unwrap() > 3);
    assert!(!win.evaluate(&[]).unwrap().contains(&witness));
}

#[test]
fn resolve_report_has_koszul_ranks() {
    let t = parse_spec(&corpus("tasks/resolve-z2-trivial.json")).unwrap();
    let rep = run(&t, false).unwrap();
    assert!(rep.verdict);
    assert_eq!(rep.result["ranks"], json!([1, 2, 1]));
    assert!(rep.chain.is_some());
}

#[test]
fn echoed_tasks_round_trip() {
    let root = corpus("tasks");
    for entry in std::fs::read_dir(&root).unwrap() {
        let t = parse_spec(&entry.unwrap().path()).unwrap();
        let rep = run(&t, false).unwrap();
        let echoed = rep.to_json()["task"].to_string();
        assert_eq!(TaskSpec::from_json_str(&echoed, None).unwrap(), t);
    }
}

#[test]
fn reports_are_byte_identical() {
    let t = parse_spec(&corpus("tasks/control-t-minus-1.json")).unwrap();
    assert_eq!(run(&t, false).unwrap().to_pretty(), run(&t, false).unwrap().to_pretty());
}

#[test]
fn manifest_lists_every_file() {
    let m = corpus_manifest(&corpus_root()).unwrap();
    let modules = m["modules"].as_array().unwrap();
    assert!(modules.len() >= 10);
    for entry in modules.iter().chain(m["tasks"].as_array().unwrap()) {
        assert!(corpus(entry["file"].as_str().unwrap()).is_file());
    }
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_ctrlmod");
    let code = |args: &[&str]| Proc::new(bin).args(args).output().unwrap().status.code();
    let lean = corpus("tasks/lean-z-trivial.json");
    let insular = corpus("tasks/insular-z-trivial.json");
    assert_eq!(code(&["run", lean.to_str().unwrap()]), Some(0));
    assert_eq!(code(&["run", insular.to_str().unwrap()]), Some(1));
    assert_eq!(code(&["run", insular.to_str().unwrap(), "--window", "2"]), Some(2));
    assert_eq!(code(&["run", "/nonexistent.json"]), Some(2));
    assert_eq!(code(&["bogus"]), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let chain = dir.path().join("chain.json");
    let out = dir.path().join("report.json");
    let resolve = corpus("tasks/resolve-z2-trivial.json");
    let status = Proc::new(bin)
        .args(["run", resolve.to_str().unwrap(), "--jobs", "2", "--emit-chain", chain.to_str().unwrap(), "--output", out.to_str().unwrap()])
        .status()
        .unwrap();
    assert!(status.success());
    let c: Value = serde_json::from_str(&std::fs::read_to_string(chain).unwrap()).unwrap();
    assert_eq!(c["ranks"], json!([1, 2, 1]));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(r["verdict"], "pass");
}
