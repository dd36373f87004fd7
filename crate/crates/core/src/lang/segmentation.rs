use thiserror::Error;

use crate::backends::TranscriptWord;
use crate::issue::{Evidence, Issue, IssueKind, Suggestion};
use crate::lang::normalize_tokens;
use crate::subtitle::{Cue, Timecode};

pub const DEFAULT_MAX_CPL: usize = 50;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SplitError {
    #[error("cue {cue} lasts {duration_ms} ms, too short for {segments} segments")]
    TooShort {
        cue: u32,
        duration_ms: u64,
        segments: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitOutcome {
    pub cues: Vec<Cue>,
    /// Every boundary came from recognized word timings.
    pub realigned: bool,
    pub warnings: Vec<String>,
}

pub fn exceeds_cpl(cue: &Cue, max_cpl: usize) -> bool {
    cue.max_line_chars() > max_cpl
}

/// Greedy packing of whitespace-separated words into segments of at most
/// `max_cpl` characters. Returns each segment as a list of word indices into
/// the returned word list.
pub fn pack_words(text: &str, max_cpl: usize) -> (Vec<String>, Vec<Vec<usize>>, Vec<String>) {
    let max_cpl = max_cpl.max(1);
    let mut words = Vec::new();
    let mut warnings = Vec::new();
    for w in text.split_whitespace() {
        let chars: Vec<char> = w.chars().collect();
        if chars.len() > max_cpl {
            warnings.push(format!("word {w:?} longer than {max_cpl} characters was hard-split"));
            for chunk in chars.chunks(max_cpl) {
                words.push(chunk.iter().collect());
            }
        } else {
            words.push(w.to_string());
        }
    }
    let mut segments: Vec<Vec<usize>> = Vec::new();
    let mut len = 0;
    for (i, w) in words.iter().enumerate() {
        let n = w.chars().count();
        match segments.last_mut() {
            Some(seg) if len + 1 + n <= max_cpl => {
                seg.push(i);
                len += 1 + n;
            }
            _ => {
                segments.push(vec![i]);
                len = n;
            }
        }
    }
    (words, segments, warnings)
}

fn key(word: &str) -> Option<String> {
    let toks = normalize_tokens(word);
    if toks.is_empty() {
        None
    } else {
        Some(toks.join(" "))
    }
}

/// Longest common subsequence over normalized keys. Returns, for each cue
/// word, the index of the matched transcript word.
fn align(cue_words: &[String], transcript: &[TranscriptWord]) -> Vec<Option<usize>> {
    let a: Vec<Option<String>> = cue_words.iter().map(|w| key(w)).collect();
    let b: Vec<Option<String>> = transcript.iter().map(|w| key(&w.text)).collect();
    let (n, m) = (a.len(), b.len());
    let mut dp = vec![vec![0usize; m + 1]; n + 1];
    for i in (0..n).rev() {
        for j in (0..m).rev() {
            dp[i][j] = if a[i].is_some() && a[i] == b[j] {
                dp[i + 1][j + 1] + 1
            } else {
                dp[i + 1][j].max(dp[i][j + 1])
            };
        }
    }
    let mut out = vec![None; n];
    let (mut i, mut j) = (0, 0);
    while i < n && j < m {
        if a[i].is_some() && a[i] == b[j] && dp[i][j] == dp[i + 1][j + 1] + 1 {
            out[i] = Some(j);
            i += 1;
            j += 1;
        } else if dp[i + 1][j] >= dp[i][j + 1] {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}

/// Splits a cue into single-line segments no longer than `max_cpl`, timing
/// each boundary from the transcript where possible and by character share
/// otherwise.
pub fn split_cue(cue: &Cue, transcript: &[TranscriptWord], max_cpl: usize) -> Result<SplitOutcome, SplitError> {
    let text = cue.space_joined();
    let (words, segments, mut warnings) = pack_words(&text, max_cpl);
    if segments.len() <= 1 && !exceeds_cpl(cue, max_cpl) {
        return Ok(SplitOutcome {
            cues: vec![cue.clone()],
            realigned: true,
            warnings,
        });
    }
    let n = segments.len();
    let (start, end) = (cue.start.0, cue.end.0);
    if end - start < n as u64 {
        return Err(SplitError::TooShort {
            cue: cue.id,
            duration_ms: end - start,
            segments: n,
        });
    }
    let matches = align(&words, transcript);
    let seg_text: Vec<String> = segments
        .iter()
        .map(|s| s.iter().map(|&i| words[i].as_str()).collect::<Vec<_>>().join(" "))
        .collect();
    let total_chars: usize = seg_text.iter().map(|s| s.chars().count()).sum::<usize>().max(1);

    let mut realigned = true;
    let mut bounds = Vec::with_capacity(n);
    let mut prev = start;
    let mut chars_so_far = 0usize;
    for (i, seg) in segments.iter().enumerate() {
        chars_so_far += seg_text[i].chars().count();
        if i + 1 == n {
            bounds.push(end);
            break;
        }
        let hi = end - (n - i - 1) as u64;
        let lo = prev + 1;
        let from_transcript = seg
            .iter()
            .rev()
            .find_map(|&w| matches[w])
            .map(|j| start + transcript[j].end_ms)
            .filter(|&t| t >= lo && t <= hi);
        let t = match from_transcript {
            Some(t) => t,
            None => {
                realigned = false;
                let share = (end - start) as u128 * chars_so_far as u128 / total_chars as u128;
                (start + share as u64).clamp(lo, hi)
            }
        };
        bounds.push(t);
        prev = t;
    }
    if !realigned {
        warnings.push("some boundaries interpolated by character share".to_string());
    }
    let mut cues = Vec::with_capacity(n);
    let mut seg_start = start;
    for (i, (line, seg_end)) in seg_text.into_iter().zip(bounds).enumerate() {
        let mut c = cue.clone();
        c.id = cue.id + i as u32;
        c.start = Timecode(seg_start);
        c.end = Timecode(seg_end);
        c.lines = vec![line];
        cues.push(c);
        seg_start = seg_end;
    }
    Ok(SplitOutcome {
        cues,
        realigned,
        warnings,
    })
}

pub fn detect_segmentation(
    cue: &Cue,
    transcript: &[TranscriptWord],
    max_cpl: usize,
) -> Result<Option<Issue>, SplitError> {
    if !exceeds_cpl(cue, max_cpl) {
        return Ok(None);
    }
    let outcome = split_cue(cue, transcript, max_cpl)?;
    Ok(Some(Issue::new(
        cue.id,
        IssueKind::Segmentation,
        Evidence::Segmentation {
            max_line_chars: cue.max_line_chars(),
            max_cpl,
            realigned: outcome.realigned,
            warnings: outcome.warnings,
        },
        Suggestion::SplitCue { cues: outcome.cues },
    )))
}
