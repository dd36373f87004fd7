use std::path::Path;

use vsat_core::eval::{f1_by_kind, label_predictions, make_synthetic_corpus, stage_report, suber, FaultSpec};
use vsat_core::pipeline::{cmd_check, cmd_fix, DetectFlags, RunConfig};
use vsat_core::{IssueKind, SubtitleDoc};

fn config(dir: &Path) -> RunConfig {
    let corpus = make_synthetic_corpus(1, &FaultSpec::one_each()).unwrap();
    let paths = corpus.write(dir).unwrap();
    let mut c = RunConfig {
        subs: paths.faulted,
        assets: Some(paths.assets),
        out: dir.join("out"),
        ..RunConfig::default()
    };
    c.backend.mock_table = Some(paths.mock_llm);
    c
}

#[test]
fn planted_faults_are_found_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let config = config(dir.path());
    let corpus = make_synthetic_corpus(1, &FaultSpec::one_each()).unwrap();
    let outcome = cmd_check(&config).unwrap();
    let report = &outcome.report;
    assert!(report.skips.is_empty(), "{:?}", report.skips);
    assert_eq!(outcome.exit_code(), 0);
    let found: Vec<(u32, IssueKind)> = report.issues.iter().map(|i| (i.cue_id, i.kind)).collect();
    let planted: Vec<(u32, IssueKind)> = corpus.labels.iter().map(|l| (l.cue_id, l.kind)).collect();
    assert_eq!(found, planted);
    for (kind, score) in f1_by_kind(&label_predictions(&corpus.labels, &report.issues)) {
        assert_eq!(score.f1, 1.0, "{kind}");
    }
}

#[test]
fn fixing_improves_the_score() {
    let dir = tempfile::tempdir().unwrap();
    let config = config(dir.path());
    let report = cmd_check(&config).unwrap().report;
    let reference = SubtitleDoc::load(&dir.path().join("ref.srt")).unwrap();
    let faulted = SubtitleDoc::load(&config.subs).unwrap();
    let fixed = cmd_fix(&config, &report, None).unwrap();
    assert!(fixed.summary.conflicts.is_empty(), "{:?}", fixed.summary.conflicts);
    let fixed_doc = SubtitleDoc::load(&config.out.join(&fixed.subtitle_name)).unwrap();
    assert!(fixed_doc.is_valid());
    assert!(fixed_doc.cues.iter().all(|c| c.max_line_chars() <= 50));
    let before = suber(&faulted, &reference).unwrap().score;
    let after = suber(&fixed_doc, &reference).unwrap().score;
    assert!(after < before, "{after} !< {before}");

    let rows = stage_report(&faulted, &reference, &report.issues, &IssueKind::LANGUAGE, 50).unwrap();
    let scores: Vec<f64> = rows.iter().map(|r| r.report.score).collect();
    assert!(scores.windows(2).all(|w| w[1] <= w[0]), "{scores:?}");
    assert!(scores.last().unwrap() < &scores[0]);
}

#[test]
fn reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let config = config(dir.path());
    let a = cmd_check(&config).unwrap().report.canonical_json();
    let b = cmd_check(&config).unwrap().report.canonical_json();
    assert_eq!(a, b);
}

#[test]
fn detect_none_is_empty() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = config(dir.path());
    config.detect = DetectFlags::all(false);
    let out = cmd_check(&config).unwrap();
    assert!(out.report.issues.is_empty());
    assert_eq!(out.exit_code(), 0);
}

#[test]
fn missing_subtitles_is_fatal() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = config(dir.path());
    config.subs = dir.path().join("nope.srt");
    assert!(cmd_check(&config).is_err());
}

#[test]
fn missing_assets_become_skips() {
    let dir = tempfile::tempdir().unwrap();
    let config = config(dir.path());
    std::fs::remove_dir_all(config.assets.as_ref().unwrap().join("3")).unwrap();
    let out = cmd_check(&config).unwrap();
    assert_eq!(out.exit_code(), 2);
    assert!(out.report.skips.iter().all(|s| s.cue_id == 3));
    assert!(!out.report.skips.is_empty());
}
