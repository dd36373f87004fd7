//! Applies accepted suggestions and manual edits to a document in one
//! canonical order, so that the result does not depend on the order in which
//! decisions were made.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::backends::CharSpan;
use crate::issue::{FontColor, Issue, IssueKind, Suggestion};
use crate::lang::nonword::{has_tag, tag_for};
use crate::lang::segmentation::pack_words;
use crate::lang::spelling::resolve_span;
use crate::lang::split_cue;
use crate::region::Region;
use crate::subtitle::{Cue, SubtitleDoc, SubtitleFormat};

/// Identifies a cue of the fixed document by the original cue it came from
/// and, when that cue was split, the segment index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CueAnchor {
    pub cue_id: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub segment: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcceptedFix {
    pub issue_id: String,
    pub cue_id: u32,
    pub kind: IssueKind,
    pub suggestion: Suggestion,
}

impl AcceptedFix {
    pub fn from_issue(issue: &Issue) -> Self {
        AcceptedFix {
            issue_id: issue.issue_id.clone(),
            cue_id: issue.cue_id,
            kind: issue.kind,
            suggestion: issue.suggestion.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManualEditOp {
    pub anchor: CueAnchor,
    pub lines: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FixPlan {
    pub accepted: Vec<AcceptedFix>,
    pub manual: Vec<ManualEditOp>,
}

impl FixPlan {
    pub fn accept_all<'a>(issues: impl IntoIterator<Item = &'a Issue>) -> Self {
        FixPlan {
            accepted: issues.into_iter().map(AcceptedFix::from_issue).collect(),
            manual: Vec::new(),
        }
    }
}

/// Rendering hints that SRT cannot carry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    pub cue_id: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub region: Option<Region>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub color: Option<FontColor>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixConflict {
    pub cue_id: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub issue_id: Option<String>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixOutcome {
    pub doc: SubtitleDoc,
    /// Origin of each cue of `doc`, index-aligned.
    pub provenance: Vec<CueAnchor>,
    pub placements: Vec<Placement>,
    pub conflicts: Vec<FixConflict>,
}

impl FixOutcome {
    /// Current id of the cue an anchor points at.
    pub fn current_id(&self, anchor: CueAnchor) -> Option<u32> {
        self.provenance
            .iter()
            .position(|a| *a == anchor)
            .map(|i| self.doc.cues[i].id)
    }

    /// Current ids of every cue derived from an original cue.
    pub fn current_ids(&self, original: u32) -> Vec<u32> {
        self.provenance
            .iter()
            .zip(&self.doc.cues)
            .filter(|(a, _)| a.cue_id == original)
            .map(|(_, c)| c.id)
            .collect()
    }
}

struct Work<'a> {
    cue: Cue,
    text: Vec<&'a AcceptedFix>,
    split: Option<&'a AcceptedFix>,
    placement: Vec<&'a AcceptedFix>,
    whole_edits: Vec<&'a ManualEditOp>,
    segment_edits: Vec<&'a ManualEditOp>,
}

fn clean_lines(lines: &[String]) -> Vec<String> {
    lines
        .iter()
        .flat_map(|l| l.split('\n'))
        .map(|l| l.trim_end_matches('\r').to_string())
        .filter(|l| !l.trim().is_empty())
        .collect()
}

fn mask(cue: &mut Cue, spans: &[CharSpan], originals: &[String]) -> Result<(), String> {
    let mut text: Vec<char> = cue.joined_text().chars().collect();
    for (span, original) in spans.iter().zip(originals) {
        let found = resolve_span(&text, original, *span)
            .ok_or_else(|| format!("masked text {original:?} no longer present"))?;
        for c in &mut text[found.start..found.end] {
            *c = '*';
        }
    }
    cue.lines = text.iter().collect::<String>().split('\n').map(str::to_string).collect();
    Ok(())
}

fn apply_text(cue: &mut Cue, suggestion: &Suggestion) -> Result<(), String> {
    match suggestion {
        Suggestion::ReplaceText { lines } => {
            let lines = clean_lines(lines);
            if lines.is_empty() {
                return Err("replacement has no text".into());
            }
            cue.lines = lines;
        }
        Suggestion::MaskSpans { spans, originals } => mask(cue, spans, originals)?,
        Suggestion::AppendTag { label } => {
            let tag = tag_for(label);
            if !has_tag(cue, &tag) {
                cue.lines.push(tag);
            }
        }
        _ => {}
    }
    Ok(())
}

/// Re-fits a split computed on the detection-time text to the current text.
fn resplit(cue: &Cue, suggested: &[Cue], max_cpl: usize) -> (Vec<Cue>, Option<String>) {
    let words: Vec<&str> = cue.lines.iter().flat_map(|l| l.split_whitespace()).collect();
    let counts: Vec<usize> = suggested
        .iter()
        .map(|s| s.lines.iter().map(|l| l.split_whitespace().count()).sum())
        .collect();
    let with_times = |texts: Vec<String>| -> Vec<Cue> {
        texts
            .into_iter()
            .zip(suggested)
            .map(|(line, seg)| {
                let mut c = cue.clone();
                c.start = seg.start;
                c.end = seg.end;
                c.lines = vec![line];
                c
            })
            .collect()
    };
    if counts.iter().sum::<usize>() == words.len() && counts.iter().all(|&n| n > 0) {
        let mut texts = Vec::with_capacity(counts.len());
        let mut i = 0;
        for n in &counts {
            texts.push(words[i..i + n].join(" "));
            i += n;
        }
        if texts.iter().all(|t| t.chars().count() <= max_cpl) {
            return (with_times(texts), None);
        }
    }
    let (packed, segments, _) = pack_words(&words.join(" "), max_cpl);
    if segments.len() == suggested.len() {
        let texts = segments
            .iter()
            .map(|s| s.iter().map(|&i| packed[i].as_str()).collect::<Vec<_>>().join(" "))
            .collect();
        return (with_times(texts), Some("split re-packed after text change".into()));
    }
    match split_cue(cue, &[], max_cpl) {
        Ok(out) => (out.cues, Some("split re-derived proportionally after text change".into())),
        Err(e) => (vec![cue.clone()], Some(format!("split dropped: {e}"))),
    }
}

/// Applies a fix plan to the original document. Per original cue the order
/// is: text fixes by issue kind, whole-cue manual edits, the split,
/// per-segment manual edits, then placement.
pub fn apply_fixes(original: &SubtitleDoc, plan: &FixPlan, max_cpl: usize) -> FixOutcome {
    let mut work: BTreeMap<u32, Work> = original
        .cues
        .iter()
        .map(|c| {
            (
                c.id,
                Work {
                    cue: c.clone(),
                    text: vec![],
                    split: None,
                    placement: vec![],
                    whole_edits: vec![],
                    segment_edits: vec![],
                },
            )
        })
        .collect();
    let mut conflicts = Vec::new();
    for fix in &plan.accepted {
        let Some(w) = work.get_mut(&fix.cue_id) else {
            conflicts.push(FixConflict {
                cue_id: fix.cue_id,
                issue_id: Some(fix.issue_id.clone()),
                reason: "unknown cue".into(),
            });
            continue;
        };
        match &fix.suggestion {
            s if s.is_text() => w.text.push(fix),
            Suggestion::SplitCue { .. } => {
                if w.split.replace(fix).is_some() {
                    conflicts.push(FixConflict {
                        cue_id: fix.cue_id,
                        issue_id: Some(fix.issue_id.clone()),
                        reason: "second split for one cue; last one kept".into(),
                    });
                }
            }
            s if s.is_placement() => w.placement.push(fix),
            _ => {}
        }
    }
    for edit in &plan.manual {
        match work.get_mut(&edit.anchor.cue_id) {
            Some(w) if edit.anchor.segment.is_none() => w.whole_edits.push(edit),
            Some(w) => w.segment_edits.push(edit),
            None => conflicts.push(FixConflict {
                cue_id: edit.anchor.cue_id,
                issue_id: None,
                reason: "manual edit of unknown cue".into(),
            }),
        }
    }

    let mut rows: Vec<(Cue, CueAnchor, Option<Region>, Option<FontColor>)> = Vec::new();
    for (id, mut w) in work {
        w.text.sort_by(|a, b| (a.kind, &a.issue_id).cmp(&(b.kind, &b.issue_id)));
        for fix in &w.text {
            if let Err(reason) = apply_text(&mut w.cue, &fix.suggestion) {
                conflicts.push(FixConflict {
                    cue_id: id,
                    issue_id: Some(fix.issue_id.clone()),
                    reason,
                });
            }
        }
        for edit in &w.whole_edits {
            let lines = clean_lines(&edit.lines);
            if !lines.is_empty() {
                w.cue.lines = lines;
            }
        }
        let segments = match w.split.map(|f| (f, &f.suggestion)) {
            Some((fix, Suggestion::SplitCue { cues })) => {
                let (segs, note) = resplit(&w.cue, cues, max_cpl);
                if let Some(reason) = note {
                    conflicts.push(FixConflict {
                        cue_id: id,
                        issue_id: Some(fix.issue_id.clone()),
                        reason,
                    });
                }
                segs
            }
            _ => vec![w.cue.clone()],
        };
        let split = w.split.is_some() && segments.len() > 1;
        let mut segments: Vec<(Cue, CueAnchor)> = segments
            .into_iter()
            .enumerate()
            .map(|(i, c)| {
                let anchor = CueAnchor {
                    cue_id: id,
                    segment: split.then_some(i),
                };
                (c, anchor)
            })
            .collect();
        for edit in &w.segment_edits {
            let lines = clean_lines(&edit.lines);
            match segments.iter_mut().find(|(_, a)| *a == edit.anchor) {
                Some((c, _)) if !lines.is_empty() => c.lines = lines,
                _ => conflicts.push(FixConflict {
                    cue_id: id,
                    issue_id: None,
                    reason: format!("manual edit targets missing segment {:?}", edit.anchor.segment),
                }),
            }
        }
        let (mut region, mut color) = (None, None);
        for fix in &w.placement {
            match fix.suggestion {
                Suggestion::MoveRegion { region: r } => region = Some(r),
                Suggestion::SetColor { color: c } => color = Some(c),
                _ => {}
            }
        }
        for (mut cue, anchor) in segments.drain(..) {
            if let (Some(r), SubtitleFormat::Vtt) = (region, original.format) {
                cue.set_position(r);
            }
            rows.push((cue, anchor, region, color));
        }
    }

    rows.sort_by_key(|(c, ..)| c.start);
    let mut doc = SubtitleDoc {
        format: original.format,
        header: original.header.clone(),
        cues: Vec::with_capacity(rows.len()),
    };
    let mut provenance = Vec::with_capacity(rows.len());
    let mut placements = Vec::new();
    for (i, (mut cue, anchor, region, color)) in rows.into_iter().enumerate() {
        cue.id = i as u32 + 1;
        if region.is_some() || color.is_some() {
            placements.push(Placement {
                cue_id: cue.id,
                region,
                color,
            });
        }
        doc.cues.push(cue);
        provenance.push(anchor);
    }
    FixOutcome {
        doc,
        provenance,
        placements,
        conflicts,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::detect_segmentation;

    fn doc() -> SubtitleDoc {
        SubtitleDoc::new(
            SubtitleFormat::Srt,
            vec![
                Cue::new(1, 0, 1000, vec!["you idiot, hello".into()]),
                Cue::new(
                    2,
                    1000,
                    5000,
                    vec!["first we chop the onions finely, then we add them to the damn hot pan".into()],
                ),
                Cue::new(3, 5000, 6000, vec!["helo".into()]),
            ],
        )
    }

    fn fix(cue_id: u32, kind: IssueKind, suggestion: Suggestion) -> AcceptedFix {
        AcceptedFix {
            issue_id: crate::issue::issue_id(cue_id, kind),
            cue_id,
            kind,
            suggestion,
        }
    }

    #[test]
    fn empty_plan_is_identity() {
        let d = doc();
        let out = apply_fixes(&d, &FixPlan::default(), 50);
        assert_eq!(out.doc.serialize(), d.serialize());
        assert!(out.conflicts.is_empty());
    }

    #[test]
    fn mask_survives_split() {
        let d = doc();
        let split = detect_segmentation(&d.cues[1], &[], 50).unwrap().unwrap();
        let text = d.cues[1].joined_text();
        let at = text.find("damn").unwrap();
        let plan = FixPlan {
            accepted: vec![
                AcceptedFix::from_issue(&split),
                fix(
                    2,
                    IssueKind::HarmfulWord,
                    Suggestion::MaskSpans {
                        spans: vec![CharSpan { start: at, end: at + 4 }],
                        originals: vec!["damn".into()],
                    },
                ),
            ],
            manual: vec![],
        };
        let out = apply_fixes(&d, &plan, 50);
        assert_eq!(out.doc.cues.len(), 4);
        let all: Vec<String> = out.doc.cues.iter().map(|c| c.joined_text()).collect();
        assert!(all.iter().any(|t| t.contains("****")));
        assert!(!all.iter().any(|t| t.contains("damn")));
        assert!(out.doc.cues.iter().all(|c| c.max_line_chars() <= 50));
        assert_eq!(out.doc.cues.iter().map(|c| c.id).collect::<Vec<_>>(), vec![1, 2, 3, 4]);
        assert_eq!(out.provenance[2], CueAnchor { cue_id: 2, segment: Some(1) });
        assert_eq!(out.current_ids(3), vec![4]);
        assert!(out.conflicts.is_empty());
    }

    #[test]
    fn decision_order_does_not_matter() {
        let d = doc();
        let split = AcceptedFix::from_issue(&detect_segmentation(&d.cues[1], &[], 50).unwrap().unwrap());
        let tag = fix(1, IssueKind::NonWord, Suggestion::AppendTag { label: "Music".into() });
        let spell = fix(1, IssueKind::ContextualSpelling, Suggestion::ReplaceText { lines: vec!["you fool, hello".into()] });
        let a = FixPlan { accepted: vec![split.clone(), tag.clone(), spell.clone()], manual: vec![] };
        let b = FixPlan { accepted: vec![spell, tag, split], manual: vec![] };
        let (oa, ob) = (apply_fixes(&d, &a, 50), apply_fixes(&d, &b, 50));
        assert_eq!(oa.doc.serialize(), ob.doc.serialize());
        assert_eq!(oa.doc.cues[0].lines, vec!["you fool, hello", "[music]"]);
    }

    #[test]
    fn manual_edits_whole_and_segment() {
        let d = doc();
        let split = AcceptedFix::from_issue(&detect_segmentation(&d.cues[1], &[], 50).unwrap().unwrap());
        let plan = FixPlan {
            accepted: vec![split],
            manual: vec![
                ManualEditOp { anchor: CueAnchor { cue_id: 3, segment: None }, lines: vec!["hello".into()] },
                ManualEditOp { anchor: CueAnchor { cue_id: 2, segment: Some(1) }, lines: vec!["to the pan".into()] },
                ManualEditOp { anchor: CueAnchor { cue_id: 2, segment: Some(7) }, lines: vec!["x".into()] },
            ],
        };
        let out = apply_fixes(&d, &plan, 50);
        assert_eq!(out.doc.cues[3].lines, vec!["hello"]);
        assert_eq!(out.doc.cues[2].lines, vec!["to the pan"]);
        assert_eq!(out.conflicts.len(), 1);
    }

    #[test]
    fn replaced_text_resplits() {
        let d = doc();
        let split = AcceptedFix::from_issue(&detect_segmentation(&d.cues[1], &[], 50).unwrap().unwrap());
        let longer = "first we chop the onions very finely, and then we add them to the hot pan".to_string();
        let plan = FixPlan {
            accepted: vec![split, fix(2, IssueKind::TimeSync, Suggestion::ReplaceText { lines: vec![longer.clone()] })],
            manual: vec![],
        };
        let out = apply_fixes(&d, &plan, 50);
        let segs: Vec<_> = out.doc.cues.iter().filter(|c| c.start.0 >= 1000 && c.end.0 <= 5000).collect();
        assert_eq!(segs.iter().map(|c| c.lines.join(" ")).collect::<Vec<_>>().join(" "), longer);
        assert!(segs.iter().all(|c| c.max_line_chars() <= 50));
        assert_eq!(out.conflicts.len(), 1);
    }

    #[test]
    fn placements_go_to_sidecar_and_vtt_settings() {
        let mut d = doc();
        let moved = Region::new(0.2, 0.45, 0.6, 0.1).unwrap();
        let plan = FixPlan {
            accepted: vec![
                fix(1, IssueKind::Positioning, Suggestion::MoveRegion { region: moved }),
                fix(1, IssueKind::FontColor, Suggestion::SetColor { color: FontColor::Black }),
            ],
            manual: vec![],
        };
        let srt = apply_fixes(&d, &plan, 50);
        assert_eq!(srt.placements, vec![Placement { cue_id: 1, region: Some(moved), color: Some(FontColor::Black) }]);
        assert_eq!(srt.doc.serialize(), d.serialize());
        d.format = SubtitleFormat::Vtt;
        let vtt = apply_fixes(&d, &plan, 50);
        assert_eq!(vtt.doc.cues[0].position, Some(moved));
        let back = SubtitleDoc::parse(&vtt.doc.serialize(), SubtitleFormat::Vtt).unwrap();
        assert_eq!(back.cues[0].position, Some(moved));
    }
}
