use std::path::PathBuf;
use std::time::Instant;

use vsat_core::{SubtitleDoc, SubtitleFormat};

fn fixtures() -> Vec<PathBuf> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/roundtrip");
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    files
}

#[test]
fn every_fixture_round_trips() {
    let files = fixtures();
    assert_eq!(files.len(), 30);
    let t = Instant::now();
    for path in &files {
        let text = std::fs::read_to_string(path).unwrap();
        let doc = SubtitleDoc::load(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert!(doc.is_valid(), "{}", path.display());
        assert_eq!(doc.serialize(), text, "{}", path.display());
    }
    assert!(t.elapsed().as_secs_f64() < 1.0);
}

#[test]
fn both_formats_and_features_are_covered() {
    let files = fixtures();
    let texts: Vec<(SubtitleFormat, String)> = files
        .iter()
        .map(|p| (SubtitleFormat::from_path(p).unwrap(), std::fs::read_to_string(p).unwrap()))
        .collect();
    assert_eq!(texts.iter().filter(|(f, _)| *f == SubtitleFormat::Srt).count(), 15);
    assert!(texts.iter().any(|(_, t)| t.contains("align:")));
    assert!(texts.iter().any(|(_, t)| t.contains("100:00:00")));
    assert!(texts.iter().any(|(_, t)| t.contains("00:00:00,000 --> 00:00:00,001")));
    let multi = files
        .iter()
        .map(|p| SubtitleDoc::load(p).unwrap())
        .any(|d| d.cues.iter().any(|c| c.lines.len() >= 3));
    assert!(multi);
}
