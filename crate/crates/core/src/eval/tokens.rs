use serde::{Deserialize, Serialize};

use crate::lang::normalize_tokens;
use crate::subtitle::{Cue, SubtitleDoc};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MetricToken {
    Word(String),
    /// Line break inside a cue.
    Eol,
    /// End of a cue.
    Eob,
}

pub fn tokenize_cue(cue: &Cue) -> Vec<MetricToken> {
    let mut out = Vec::new();
    for (i, line) in cue.lines.iter().enumerate() {
        if i > 0 {
            out.push(MetricToken::Eol);
        }
        out.extend(normalize_tokens(line).into_iter().map(MetricToken::Word));
    }
    out.push(MetricToken::Eob);
    out
}

pub fn tokenize_doc(doc: &SubtitleDoc) -> Vec<MetricToken> {
    doc.cues.iter().flat_map(tokenize_cue).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subtitle::SubtitleFormat;
    use MetricToken::*;

    fn w(s: &str) -> MetricToken {
        Word(s.into())
    }

    #[test]
    fn examples() {
        let one = SubtitleDoc::new(SubtitleFormat::Srt, vec![Cue::new(1, 0, 10, vec!["hello world".into()])]);
        assert_eq!(tokenize_doc(&one), vec![w("hello"), w("world"), Eob]);
        let two = SubtitleDoc::new(SubtitleFormat::Srt, vec![Cue::new(1, 0, 10, vec!["a".into(), "b".into()])]);
        assert_eq!(tokenize_doc(&two), vec![w("a"), Eol, w("b"), Eob]);
        assert!(tokenize_doc(&SubtitleDoc::new(SubtitleFormat::Srt, vec![])).is_empty());
    }
}
