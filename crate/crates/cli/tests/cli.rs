use std::process::Command;

fn vsat() -> Command {
    Command::new(env!("CARGO_BIN_EXE_vsat"))
}

fn corpus(dir: &std::path::Path) -> vsat_core::eval::CorpusPaths {
    let out = vsat().args(["corpus", "--seed", "3", "--out"]).arg(dir).output().unwrap();
    assert!(out.status.success());
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn missing_subtitles_exit_fatal() {
    let dir = tempfile::tempdir().unwrap();
    let out = vsat()
        .arg("check")
        .arg("--subs")
        .arg(dir.path().join("absent.srt"))
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("absent.srt"));
}

#[test]
fn detect_none_exits_clean_with_empty_report() {
    let dir = tempfile::tempdir().unwrap();
    let paths = corpus(dir.path());
    let out_dir = dir.path().join("out");
    let out = vsat()
        .arg("check")
        .arg("--subs")
        .arg(&paths.faulted)
        .args(["--detect", "none", "--out"])
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = vsat_core::pipeline::RunReport::load(&out_dir.join("report.json")).unwrap();
    assert!(report.issues.is_empty());
    assert!(out_dir.join("table.csv").exists());
}

#[test]
fn eval_prints_suber() {
    let dir = tempfile::tempdir().unwrap();
    let paths = corpus(dir.path());
    let out = vsat().arg("eval").arg("--ref").arg(&paths.reference).arg("--hyp").arg(&paths.reference).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["suber"]["score"], 0.0);
}

#[test]
fn unknown_fault_kind_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = vsat().args(["corpus", "--faults", "bogus=1", "--out"]).arg(dir.path()).output().unwrap();
    assert!(!out.status.success());
}
