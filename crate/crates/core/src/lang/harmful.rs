use thiserror::Error;

use crate::backends::{llm_complete, prompts, BackendError, CharSpan, LlmBackend, LlmResponse};
use crate::issue::{Evidence, Issue, IssueKind, Suggestion};
use crate::subtitle::Cue;

#[derive(Debug, Error, PartialEq)]
pub enum HarmError {
    #[error(transparent)]
    Backend(#[from] BackendError),
    #[error("span {0:?} is out of bounds")]
    OutOfBounds(CharSpan),
    #[error("span {0:?} crosses a line break")]
    CrossesLine(CharSpan),
}

/// Replaces every character inside the spans with `*`.
pub fn mask_spans(text: &str, spans: &[CharSpan]) -> String {
    text.chars()
        .enumerate()
        .map(|(i, c)| {
            if spans.iter().any(|s| s.start <= i && i < s.end) {
                '*'
            } else {
                c
            }
        })
        .collect()
}

pub fn check_spans(text: &str, spans: &[CharSpan]) -> Result<(), HarmError> {
    let chars: Vec<char> = text.chars().collect();
    for &span in spans {
        if span.start >= span.end || span.end > chars.len() {
            return Err(HarmError::OutOfBounds(span));
        }
        if chars[span.start..span.end].contains(&'\n') {
            return Err(HarmError::CrossesLine(span));
        }
    }
    Ok(())
}

pub fn detect_harmful(cue: &Cue, llm: &dyn LlmBackend) -> Result<Option<Issue>, HarmError> {
    let mut spans = match llm_complete(llm, &prompts::harm_spans(cue))? {
        LlmResponse::HarmSpans(r) => r.spans,
        _ => unreachable!("schema-checked"),
    };
    if spans.is_empty() {
        return Ok(None);
    }
    let text = cue.joined_text();
    check_spans(&text, &spans)?;
    spans.sort();
    spans.dedup();
    let chars: Vec<char> = text.chars().collect();
    let originals = spans
        .iter()
        .map(|s| chars[s.start..s.end].iter().collect())
        .collect();
    Ok(Some(Issue::new(
        cue.id,
        IssueKind::HarmfulWord,
        Evidence::HarmfulWord { spans: spans.clone() },
        Suggestion::MaskSpans { spans, originals },
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backends::MockLlm;
    use proptest::prelude::*;
    use serde_json::json;

    #[test]
    fn masks_idiot() {
        let spans = [CharSpan { start: 4, end: 9 }];
        assert_eq!(mask_spans("you idiot!", &spans), "you *****!");
    }

    #[test]
    fn detects_via_model() {
        let cue = Cue::new(1, 0, 1000, vec!["you idiot!".into()]);
        let mut mock = MockLlm::new();
        mock.insert(&prompts::harm_spans(&cue), json!({"spans": [{"start": 4, "end": 9}]}));
        let issue = detect_harmful(&cue, &mock).unwrap().unwrap();
        assert_eq!(
            issue.suggestion,
            Suggestion::MaskSpans { spans: vec![CharSpan { start: 4, end: 9 }], originals: vec!["idiot".into()] }
        );
        assert!(detect_harmful(&cue, &MockLlm::silent()).unwrap().is_none());
    }

    #[test]
    fn span_across_line_break_rejected() {
        let cue = Cue::new(1, 0, 1000, vec!["you".into(), "idiot".into()]);
        let mut mock = MockLlm::new();
        mock.insert(&prompts::harm_spans(&cue), json!({"spans": [{"start": 2, "end": 6}]}));
        assert_eq!(
            detect_harmful(&cue, &mock).unwrap_err(),
            HarmError::CrossesLine(CharSpan { start: 2, end: 6 })
        );
        let mut mock = MockLlm::new();
        mock.insert(&prompts::harm_spans(&cue), json!({"spans": [{"start": 4, "end": 60}]}));
        assert!(matches!(detect_harmful(&cue, &mock), Err(HarmError::OutOfBounds(_))));
    }

    proptest! {
        #[test]
        fn masking_preserves_length_and_outside(text in "[a-z \n!?]{0,40}", a in 0usize..40, l in 1usize..10) {
            let span = CharSpan { start: a, end: a + l };
            let masked = mask_spans(&text, &[span]);
            prop_assert_eq!(masked.chars().count(), text.chars().count());
            for (i, (m, o)) in masked.chars().zip(text.chars()).enumerate() {
                if i < span.start || i >= span.end {
                    prop_assert_eq!(m, o);
                } else {
                    prop_assert_eq!(m, '*');
                }
            }
        }
    }
}
