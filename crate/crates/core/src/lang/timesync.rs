use crate::backends::TranscriptWord;
use crate::issue::{Evidence, Issue, IssueKind, Suggestion};
use crate::lang::{cosine_bow, normalize_tokens};
use crate::subtitle::Cue;

pub const DEFAULT_THRESHOLD: f64 = 0.7;

/// Flags when the similarity falls strictly below the threshold.
pub fn is_out_of_sync(similarity: f64, threshold: f64) -> bool {
    similarity < threshold
}

/// Compares cue text with the recognized speech of its clip.
pub fn detect_time_sync(cue: &Cue, words: &[TranscriptWord], threshold: f64) -> Option<Issue> {
    let transcript = words.iter().map(|w| w.text.as_str()).collect::<Vec<_>>().join(" ");
    let cue_tokens = normalize_tokens(&cue.joined_text());
    let transcript_tokens = normalize_tokens(&transcript);
    let similarity: f64 = cosine_bow(&cue_tokens, &transcript_tokens);
    if !is_out_of_sync(similarity, threshold) {
        return None;
    }
    let suggestion = if transcript.trim().is_empty() {
        Suggestion::None
    } else {
        Suggestion::ReplaceText {
            lines: vec![transcript.trim().to_string()],
        }
    };
    Some(Issue::new(
        cue.id,
        IssueKind::TimeSync,
        Evidence::TimeSync {
            similarity,
            threshold,
            cue_tokens,
            transcript_tokens,
        },
        suggestion,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn words(text: &str) -> Vec<TranscriptWord> {
        text.split_whitespace()
            .enumerate()
            .map(|(i, w)| TranscriptWord {
                text: w.into(),
                start_ms: i as u64 * 100,
                end_ms: i as u64 * 100 + 90,
                confidence: 1.0,
            })
            .collect()
    }

    #[test]
    fn identical_text() {
        let cue = Cue::new(1, 0, 1000, vec!["Hello world.".into()]);
        assert!(detect_time_sync(&cue, &words("hello world"), 0.7).is_none());
    }

    #[test]
    fn half_overlap_flags() {
        let cue = Cue::new(1, 0, 1000, vec!["hello world".into()]);
        let issue = detect_time_sync(&cue, &words("hello there"), 0.7).unwrap();
        match issue.evidence {
            Evidence::TimeSync { similarity, .. } => assert!((similarity - 0.5).abs() < 1e-12),
            _ => unreachable!(),
        }
        assert_eq!(issue.suggestion, Suggestion::ReplaceText { lines: vec!["hello there".into()] });
    }

    #[test]
    fn disjoint_and_silent() {
        let cue = Cue::new(1, 0, 1000, vec!["alpha beta".into()]);
        assert!(detect_time_sync(&cue, &words("gamma"), 0.7).is_some());
        let issue = detect_time_sync(&cue, &[], 0.7).unwrap();
        assert_eq!(issue.suggestion, Suggestion::None);
    }

    #[test]
    fn boundary_is_strict() {
        assert!(!is_out_of_sync(0.7, 0.7));
        assert!(is_out_of_sync(0.699, 0.7));
    }
}
