use serde::{Deserialize, Serialize};

use crate::backends::{llm_complete, prompts, BackendError, CharSpan, LlmBackend, LlmResponse};
use crate::issue::{Evidence, Issue, IssueKind, SpellFinding, Suggestion};
use crate::subtitle::Cue;

/// Suffixes a correction must not merely append to the flagged word.
pub const FORBIDDEN_SUFFIXES: [&str; 9] = ["y", "ness", "ful", "less", "ed", "ly", "ing", "s", "es"];

pub const RULE2_NOTE: &str = "not programmatically checked; delegated to the model";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpellRule {
    /// No grammatical-category-changing suffix.
    NoSuffix = 1,
    /// Meaningful and contextual (model-judged).
    Meaningful = 2,
    /// Differs from the original in spelling.
    SpellingOnly = 3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleCheck {
    Pass,
    Fail(SpellRule),
}

/// Checks a lowercase candidate against the programmatic rules.
pub fn validate_spell_rules(original: &str, candidate: &str) -> RuleCheck {
    if candidate == original {
        return RuleCheck::Fail(SpellRule::SpellingOnly);
    }
    let adds_suffix = candidate
        .strip_prefix(original)
        .is_some_and(|rest| FORBIDDEN_SUFFIXES.contains(&rest));
    if adds_suffix {
        return RuleCheck::Fail(SpellRule::NoSuffix);
    }
    RuleCheck::Pass
}

fn char_slice(text: &[char], span: CharSpan) -> String {
    text[span.start..span.end].iter().collect()
}

/// Locates the reported word: trusts the span when it matches, otherwise
/// takes the occurrence nearest to the reported start.
pub(crate) fn resolve_span(text: &[char], word: &str, span: CharSpan) -> Option<CharSpan> {
    let len = word.chars().count();
    if span.end <= text.len() && span.start < span.end && char_slice(text, span) == word {
        return Some(span);
    }
    if len == 0 || len > text.len() {
        return None;
    }
    let needle: Vec<char> = word.chars().collect();
    (0..=text.len() - len)
        .filter(|&i| text[i..i + len] == needle[..])
        .min_by_key(|&i| i.abs_diff(span.start))
        .map(|i| CharSpan { start: i, end: i + len })
}

/// Asks the model for contextually wrong words, then for corrections, and
/// keeps only candidates that pass the rule checks.
pub fn detect_contextual_spelling(
    cue: &Cue,
    context: &[Cue],
    llm: &dyn LlmBackend,
) -> Result<Vec<SpellFinding>, BackendError> {
    let text: Vec<char> = cue.joined_text().chars().collect();
    let raw = match llm_complete(llm, &prompts::spell_findings(cue, context))? {
        LlmResponse::SpellFindings(r) => r.findings,
        _ => unreachable!("schema-checked"),
    };
    let mut findings: Vec<SpellFinding> = Vec::new();
    for f in raw {
        let Some(span) = resolve_span(&text, &f.word, CharSpan { start: f.start, end: f.end }) else {
            log::warn!("cue {}: dropping finding {:?} not present in text", cue.id, f.word);
            continue;
        };
        if findings.iter().any(|g| g.char_span.start < span.end && span.start < g.char_span.end) {
            continue;
        }
        let candidates = match llm_complete(llm, &prompts::spell_fix(cue, context, &f.word))? {
            LlmResponse::SpellFix(r) => r.candidates,
            _ => unreachable!("schema-checked"),
        };
        let original = f.word.to_lowercase();
        let mut kept: Vec<String> = Vec::new();
        for c in candidates {
            let c = c.trim().to_string();
            if c.is_empty() || c.contains(char::is_whitespace) {
                continue;
            }
            if validate_spell_rules(&original, &c.to_lowercase()) == RuleCheck::Pass && !kept.contains(&c) {
                kept.push(c);
            }
        }
        if kept.is_empty() {
            continue;
        }
        findings.push(SpellFinding {
            word: f.word,
            char_span: span,
            candidates: kept,
            rationale: f.rationale,
        });
    }
    findings.sort_by_key(|f| f.char_span);
    Ok(findings)
}

fn match_case(original: &str, candidate: &str) -> String {
    let mut chars = original.chars();
    let first_upper = chars.next().is_some_and(char::is_uppercase);
    let all_upper = original.chars().filter(|c| c.is_alphabetic()).all(char::is_uppercase)
        && original.chars().filter(|c| c.is_alphabetic()).count() > 1;
    if all_upper {
        candidate.to_uppercase()
    } else if first_upper {
        let mut c = candidate.chars();
        c.next()
            .map(|f| f.to_uppercase().chain(c).collect())
            .unwrap_or_default()
    } else {
        candidate.to_string()
    }
}

/// Builds the issue replacing every flagged word with its best candidate.
pub fn spelling_issue(cue: &Cue, findings: Vec<SpellFinding>) -> Option<Issue> {
    if findings.is_empty() {
        return None;
    }
    let mut text: Vec<char> = cue.joined_text().chars().collect();
    for f in findings.iter().rev() {
        let replacement: Vec<char> = match_case(&f.word, &f.candidates[0]).chars().collect();
        text.splice(f.char_span.start..f.char_span.end, replacement);
    }
    let joined: String = text.into_iter().collect();
    let lines = joined.split('\n').map(str::to_string).collect();
    Some(Issue::new(
        cue.id,
        IssueKind::ContextualSpelling,
        Evidence::ContextualSpelling {
            findings,
            rule2: RULE2_NOTE.to_string(),
        },
        Suggestion::ReplaceText { lines },
    ))
}
