use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::backends::{Backends, Transcript};
use crate::issue::{sort_issues, Issue, IssueKind, Skip};
use crate::lang::{
    detect_contextual_spelling, detect_harmful, detect_non_word, detect_segmentation, detect_time_sync,
    nonword, segmentation, spelling_issue, timesync,
};
use crate::media::AudioClip;
use crate::subtitle::{Cue, SubtitleDoc};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LanguageConfig {
    pub spelling: bool,
    pub harmful: bool,
    pub time_sync: bool,
    pub non_word: bool,
    pub segmentation: bool,
    pub sync_threshold: f64,
    pub event_threshold: f64,
    pub max_cpl: usize,
    pub context_cues: usize,
}

impl Default for LanguageConfig {
    fn default() -> Self {
        LanguageConfig {
            spelling: true,
            harmful: true,
            time_sync: true,
            non_word: true,
            segmentation: true,
            sync_threshold: timesync::DEFAULT_THRESHOLD,
            event_threshold: nonword::DEFAULT_THRESHOLD,
            max_cpl: segmentation::DEFAULT_MAX_CPL,
            context_cues: 3,
        }
    }
}

impl LanguageConfig {
    pub fn enabled(&self, kind: IssueKind) -> bool {
        match kind {
            IssueKind::ContextualSpelling => self.spelling,
            IssueKind::HarmfulWord => self.harmful,
            IssueKind::TimeSync => self.time_sync,
            IssueKind::NonWord => self.non_word,
            IssueKind::Segmentation => self.segmentation,
            _ => false,
        }
    }

    fn needs_audio(&self) -> bool {
        self.time_sync || self.non_word || self.segmentation
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PassOutput {
    pub issues: Vec<Issue>,
    pub skips: Vec<Skip>,
    pub warnings: Vec<String>,
}

impl PassOutput {
    pub fn extend(&mut self, other: PassOutput) {
        self.issues.extend(other.issues);
        self.skips.extend(other.skips);
        self.warnings.extend(other.warnings);
    }

    pub fn finish(mut self) -> Self {
        sort_issues(&mut self.issues);
        self.skips.sort();
        self
    }
}

fn run_cue(
    cue: &Cue,
    context: &[Cue],
    audio: Option<&Result<AudioClip, String>>,
    backends: &Backends,
    config: &LanguageConfig,
) -> PassOutput {
    let mut out = PassOutput::default();
    let llm = backends.llm.as_ref();

    if config.spelling {
        match detect_contextual_spelling(cue, context, llm) {
            Ok(findings) => out.issues.extend(spelling_issue(cue, findings)),
            Err(e) => out.skips.push(Skip::new(cue.id, IssueKind::ContextualSpelling, e.to_string())),
        }
    }
    if config.harmful {
        match detect_harmful(cue, llm) {
            Ok(issue) => out.issues.extend(issue),
            Err(e) => out.skips.push(Skip::new(cue.id, IssueKind::HarmfulWord, e.to_string())),
        }
    }
    if !config.needs_audio() {
        return out;
    }

    let clip = match audio {
        Some(Ok(clip)) => Ok(clip),
        Some(Err(e)) => Err(format!("audio unavailable: {e}")),
        None => Err("audio unavailable".to_string()),
    };
    let transcript: Result<Transcript, String> = match &clip {
        Ok(clip) if config.time_sync || config.segmentation => backends
            .asr
            .transcribe(clip)
            .map(|t| {
                out.warnings.extend(t.warnings.iter().map(|w| format!("cue {}: {w}", cue.id)));
                t
            })
            .map_err(|e| e.to_string()),
        Ok(_) => Ok(Transcript::default()),
        Err(e) => Err(e.clone()),
    };

    if config.time_sync {
        match &transcript {
            Ok(t) => out.issues.extend(detect_time_sync(cue, &t.words, config.sync_threshold)),
            Err(e) => out.skips.push(Skip::new(cue.id, IssueKind::TimeSync, e.clone())),
        }
    }
    if config.non_word {
        match clip.as_ref().map_err(Clone::clone).and_then(|c| backends.events.classify(c).map_err(|e| e.to_string())) {
            Ok(events) => out.issues.extend(detect_non_word(cue, &events, config.event_threshold)),
            Err(e) => out.skips.push(Skip::new(cue.id, IssueKind::NonWord, e)),
        }
    }
    if config.segmentation {
        let words = match &transcript {
            Ok(t) => t.words.as_slice(),
            Err(e) => {
                if segmentation::exceeds_cpl(cue, config.max_cpl) {
                    out.warnings.push(format!("cue {}: splitting without word timings ({e})", cue.id));
                }
                &[]
            }
        };
        match detect_segmentation(cue, words, config.max_cpl) {
            Ok(issue) => out.issues.extend(issue),
            Err(e) => out.skips.push(Skip::new(cue.id, IssueKind::Segmentation, e.to_string())),
        }
    }
    out
}

/// Runs the enabled text and audio detectors over every cue. Detector
/// failures become skips; the pass itself never fails.
pub fn run_language_pass(
    doc: &SubtitleDoc,
    audio: &BTreeMap<u32, Result<AudioClip, String>>,
    backends: &Backends,
    config: &LanguageConfig,
    parallelism: usize,
) -> PassOutput {
    let cues = &doc.cues;
    let parts: Vec<PassOutput> = crate::pool::install(parallelism, || {
        cues.par_iter()
            .enumerate()
            .map(|(i, cue)| {
                let context = &cues[i.saturating_sub(config.context_cues)..i];
                run_cue(cue, context, audio.get(&cue.id), backends, config)
            })
            .collect()
    });
    let mut out = PassOutput::default();
    for p in parts {
        out.extend(p);
    }
    out.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backends::{AudioEventClassifier, BackendError, EventScore, MockLlm, Transcriber};
    use crate::subtitle::SubtitleFormat;
    use std::sync::Arc;

    struct Silent;
    impl Transcriber for Silent {
        fn transcribe(&self, _: &AudioClip) -> Result<Transcript, BackendError> {
            Ok(Transcript::default())
        }
    }
    impl AudioEventClassifier for Silent {
        fn classify(&self, _: &AudioClip) -> Result<Vec<EventScore>, BackendError> {
            Ok(vec![])
        }
    }

    fn silent() -> Backends {
        Backends {
            llm: Arc::new(MockLlm::silent()),
            asr: Arc::new(Silent),
            events: Arc::new(Silent),
        }
    }

    fn clips(doc: &SubtitleDoc) -> BTreeMap<u32, Result<AudioClip, String>> {
        doc.cues
            .iter()
            .map(|c| {
                (c.id, Ok(AudioClip { cue_id: c.id, sample_rate_hz: 16_000, channels: 1, samples: vec![] }))
            })
            .collect()
    }

    #[test]
    fn clean_doc_is_clean_without_sync() {
        let doc = SubtitleDoc::parse("1\n00:00:01,000 --> 00:00:02,000\nhello\n\n", SubtitleFormat::Srt).unwrap();
        let cfg = LanguageConfig { time_sync: false, ..Default::default() };
        let out = run_language_pass(&doc, &clips(&doc), &silent(), &cfg, 2);
        assert!(out.issues.is_empty());
        assert!(out.skips.is_empty());
    }

    #[test]
    fn one_long_cue_one_issue() {
        let text = "a ".repeat(26);
        let doc = SubtitleDoc::parse(&format!("1\n00:00:01,000 --> 00:00:04,000\n{}\n\n", text.trim()), SubtitleFormat::Srt).unwrap();
        let cfg = LanguageConfig { time_sync: false, ..Default::default() };
        let out = run_language_pass(&doc, &clips(&doc), &silent(), &cfg, 1);
        assert_eq!(out.issues.len(), 1);
        assert_eq!(out.issues[0].kind, IssueKind::Segmentation);
    }

    #[test]
    fn missing_audio_becomes_skips() {
        let doc = SubtitleDoc::parse("1\n00:00:01,000 --> 00:00:02,000\nhello\n\n", SubtitleFormat::Srt).unwrap();
        let out = run_language_pass(&doc, &BTreeMap::new(), &silent(), &LanguageConfig::default(), 1);
        let kinds: Vec<_> = out.skips.iter().map(|s| s.detector.as_str()).collect();
        assert_eq!(kinds, vec!["nonword", "timesync"]);
        assert!(out.issues.is_empty());
    }

    #[test]
    fn missing_mock_is_a_skip_not_a_failure() {
        let doc = SubtitleDoc::parse("1\n00:00:01,000 --> 00:00:02,000\nhello\n\n", SubtitleFormat::Srt).unwrap();
        let mut b = silent();
        b.llm = Arc::new(MockLlm::new());
        let cfg = LanguageConfig { time_sync: false, ..Default::default() };
        let out = run_language_pass(&doc, &clips(&doc), &b, &cfg, 1);
        assert_eq!(out.skips.len(), 2);
    }
}
