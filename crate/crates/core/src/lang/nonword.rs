use crate::backends::EventScore;
use crate::issue::{Evidence, Issue, IssueKind, Suggestion};
use crate::subtitle::Cue;

pub const DEFAULT_THRESHOLD: f64 = 0.3;
pub const SPEECH_LABEL: &str = "Speech";

pub fn exceeds_event_threshold(score: f64, threshold: f64) -> bool {
    score > threshold
}

pub fn tag_for(label: &str) -> String {
    format!("[{}]", label.to_lowercase())
}

pub fn has_tag(cue: &Cue, tag: &str) -> bool {
    cue.lines.iter().any(|l| l.to_lowercase().contains(tag))
}

/// Suggests appending the strongest non-speech event as a bracketed tag.
pub fn detect_non_word(cue: &Cue, events: &[EventScore], threshold: f64) -> Option<Issue> {
    let top = events
        .iter()
        .filter(|e| e.label != SPEECH_LABEL)
        .max_by(|a, b| a.score.total_cmp(&b.score).then_with(|| b.label.cmp(&a.label)))?;
    if !exceeds_event_threshold(top.score, threshold) || has_tag(cue, &tag_for(&top.label)) {
        return None;
    }
    Some(Issue::new(
        cue.id,
        IssueKind::NonWord,
        Evidence::NonWord {
            label: top.label.clone(),
            score: top.score,
            threshold,
            candidates: events.to_vec(),
        },
        Suggestion::AppendTag {
            label: top.label.clone(),
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(label: &str, score: f64) -> EventScore {
        EventScore { label: label.into(), score }
    }

    #[test]
    fn music_tag() {
        let cue = Cue::new(1, 0, 1000, vec!["♪".into()]);
        let issue = detect_non_word(&cue, &[ev("Music", 0.71), ev("Speech", 0.1)], 0.3).unwrap();
        assert_eq!(issue.suggestion, Suggestion::AppendTag { label: "Music".into() });
        assert_eq!(tag_for("Music"), "[music]");
    }

    #[test]
    fn below_threshold_and_speech_ignored() {
        let cue = Cue::new(1, 0, 1000, vec!["hi".into()]);
        assert!(detect_non_word(&cue, &[ev("Music", 0.29)], 0.3).is_none());
        assert!(detect_non_word(&cue, &[ev("Speech", 0.99)], 0.3).is_none());
        assert!(detect_non_word(&cue, &[ev("Music", 0.3)], 0.3).is_none());
        assert!(detect_non_word(&cue, &[ev("Music", 0.301)], 0.3).is_some());
    }

    #[test]
    fn existing_tag_is_idempotent() {
        let cue = Cue::new(1, 0, 1000, vec!["hi".into(), "[music]".into()]);
        assert!(detect_non_word(&cue, &[ev("Music", 0.9)], 0.3).is_none());
    }
}
