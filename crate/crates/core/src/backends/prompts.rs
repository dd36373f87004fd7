//! Versioned prompt templates. Each file holds the system prompt, a `---`
//! separator line, and the user prompt template.

use super::{LlmRequest, ResponseSchema};
use crate::subtitle::Cue;

pub const PROMPT_VERSION: &str = "1";

const SPELL_FINDINGS: &str = include_str!("../../prompts/spell_findings.txt");
const SPELL_FIX: &str = include_str!("../../prompts/spell_fix.txt");
const HARM_SPANS: &str = include_str!("../../prompts/harm_spans.txt");

fn split(template: &str) -> (&str, &str) {
    template
        .split_once("\n---\n")
        .map(|(s, u)| (s.trim(), u.trim()))
        .unwrap_or(("", template.trim()))
}

fn context_block(context: &[Cue]) -> String {
    if context.is_empty() {
        return "(none)".to_string();
    }
    context
        .iter()
        .map(|c| c.space_joined())
        .collect::<Vec<_>>()
        .join("\n")
}

fn build(template: &str, schema: ResponseSchema, fill: &[(&str, &str)]) -> LlmRequest {
    let (system, user) = split(template);
    let mut user = user.to_string();
    for (key, value) in fill {
        user = user.replace(&format!("{{{key}}}"), value);
    }
    LlmRequest::new(system, user, schema)
}

pub fn spell_findings(cue: &Cue, context: &[Cue]) -> LlmRequest {
    build(
        SPELL_FINDINGS,
        ResponseSchema::SpellFindings,
        &[("context", &context_block(context)), ("text", &cue.joined_text())],
    )
}

pub fn spell_fix(cue: &Cue, context: &[Cue], word: &str) -> LlmRequest {
    build(
        SPELL_FIX,
        ResponseSchema::SpellFix,
        &[
            ("context", &context_block(context)),
            ("text", &cue.joined_text()),
            ("word", word),
        ],
    )
}

pub fn harm_spans(cue: &Cue) -> LlmRequest {
    build(HARM_SPANS, ResponseSchema::HarmSpans, &[("text", &cue.joined_text())])
}
