use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::eval::tokens::{tokenize_cue, MetricToken};
use crate::subtitle::{Cue, SubtitleDoc};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricError {
    #[error("reference has no tokens")]
    EmptyReference,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditCounts {
    pub substitution: usize,
    pub insertion: usize,
    pub deletion: usize,
    pub shift: usize,
}

impl EditCounts {
    pub fn total(&self) -> usize {
        self.substitution + self.insertion + self.deletion + self.shift
    }

    fn add(&mut self, other: &EditCounts) {
        self.substitution += other.substitution;
        self.insertion += other.insertion;
        self.deletion += other.deletion;
        self.shift += other.shift;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuberReport {
    pub score: f64,
    pub edits: EditCounts,
    pub ref_tokens: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EditOp {
    Match,
    Substitute,
    /// Token present in the hypothesis only.
    Insert,
    /// Token present in the reference only.
    Delete,
}

/// Levenshtein alignment of two token sequences with unit costs. On equal
/// cost the backtrace prefers the diagonal, then deletion.
pub fn align_tokens<T: PartialEq>(hyp: &[T], reference: &[T]) -> Vec<EditOp> {
    let (n, m) = (hyp.len(), reference.len());
    let mut d = vec![vec![0usize; m + 1]; n + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i;
    }
    for j in 0..=m {
        d[0][j] = j;
    }
    for i in 1..=n {
        for j in 1..=m {
            let diag = d[i - 1][j - 1] + usize::from(hyp[i - 1] != reference[j - 1]);
            d[i][j] = diag.min(d[i - 1][j] + 1).min(d[i][j - 1] + 1);
        }
    }
    let mut ops = Vec::with_capacity(n.max(m));
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        if i > 0 && j > 0 {
            let same = hyp[i - 1] == reference[j - 1];
            if d[i][j] == d[i - 1][j - 1] + usize::from(!same) {
                ops.push(if same { EditOp::Match } else { EditOp::Substitute });
                i -= 1;
                j -= 1;
                continue;
            }
        }
        if j > 0 && d[i][j] == d[i][j - 1] + 1 {
            ops.push(EditOp::Delete);
            j -= 1;
        } else {
            ops.push(EditOp::Insert);
            i -= 1;
        }
    }
    ops.reverse();
    ops
}

pub fn edit_counts(ops: &[EditOp]) -> EditCounts {
    let mut c = EditCounts::default();
    for op in ops {
        match op {
            EditOp::Match => {}
            EditOp::Substitute => c.substitution += 1,
            EditOp::Insert => c.insertion += 1,
            EditOp::Delete => c.deletion += 1,
        }
    }
    c
}

fn overlap(a: &Cue, b: &Cue) -> u64 {
    a.end.0.min(b.end.0).saturating_sub(a.start.0.max(b.start.0))
}

/// Greedy one-to-one pairing by largest time overlap that never crosses an
/// accepted pair. Ties go to the earlier reference cue. Returns
/// `(hyp index, ref index)` pairs in order.
pub fn pair_cues(hyp: &[Cue], reference: &[Cue]) -> Vec<(usize, usize)> {
    let mut candidates = Vec::new();
    for (h, hc) in hyp.iter().enumerate() {
        for (r, rc) in reference.iter().enumerate() {
            let o = overlap(hc, rc);
            if o > 0 {
                candidates.push((o, h, r));
            }
        }
    }
    candidates.sort_by(|a, b| b.0.cmp(&a.0).then(a.2.cmp(&b.2)).then(a.1.cmp(&b.1)));
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for (_, h, r) in candidates {
        let ok = pairs
            .iter()
            .all(|&(ph, pr)| (ph < h && pr < r) || (ph > h && pr > r));
        if ok {
            pairs.push((h, r));
        }
    }
    pairs.sort();
    pairs
}

/// One comparison unit: a pair, or an unpaired cue on either side.
struct Unit {
    hyp: Vec<MetricToken>,
    reference: Vec<MetricToken>,
}

fn units(hyp: &[Cue], reference: &[Cue]) -> Vec<Unit> {
    let pairs = pair_cues(hyp, reference);
    let mut keyed: Vec<(u64, usize, Unit)> = Vec::new();
    let (mut hi, mut ri) = (0, 0);
    let push_unpaired_until = |keyed: &mut Vec<(u64, usize, Unit)>, h_end: usize, r_end: usize, hi: &mut usize, ri: &mut usize| {
        while *ri < r_end {
            let c = &reference[*ri];
            keyed.push((c.start.0, 0, Unit { hyp: vec![], reference: tokenize_cue(c) }));
            *ri += 1;
        }
        while *hi < h_end {
            let c = &hyp[*hi];
            keyed.push((c.start.0, 1, Unit { hyp: tokenize_cue(c), reference: vec![] }));
            *hi += 1;
        }
    };
    for &(h, r) in &pairs {
        push_unpaired_until(&mut keyed, h, r, &mut hi, &mut ri);
        let start = hyp[h].start.0.min(reference[r].start.0);
        keyed.push((start, 0, Unit { hyp: tokenize_cue(&hyp[h]), reference: tokenize_cue(&reference[r]) }));
        hi = h + 1;
        ri = r + 1;
    }
    push_unpaired_until(&mut keyed, hyp.len(), reference.len(), &mut hi, &mut ri);
    keyed.sort_by_key(|(t, side, _)| (*t, *side));
    keyed.into_iter().map(|(.., u)| u).collect()
}

type WordBag = HashMap<String, usize>;

fn bag(tokens: &[MetricToken], ops: &[EditOp], wanted: EditOp) -> WordBag {
    // Walk the alignment to recover which tokens were inserted or deleted.
    let (mut bag, mut hi, mut ri) = (WordBag::new(), 0usize, 0usize);
    for op in ops {
        let token = match op {
            EditOp::Match | EditOp::Substitute => {
                hi += 1;
                ri += 1;
                None
            }
            EditOp::Insert => {
                hi += 1;
                (wanted == EditOp::Insert).then(|| &tokens[hi - 1])
            }
            EditOp::Delete => {
                ri += 1;
                (wanted == EditOp::Delete).then(|| &tokens[ri - 1])
            }
        };
        if let Some(MetricToken::Word(w)) = token {
            *bag.entry(w.clone()).or_default() += 1;
        }
    }
    bag
}

fn take_common(a: &mut WordBag, b: &mut WordBag) -> usize {
    let mut moved = 0;
    for (w, n) in a.iter_mut() {
        if let Some(m) = b.get_mut(w) {
            let k = (*n).min(*m);
            *n -= k;
            *m -= k;
            moved += k;
        }
    }
    moved
}

/// Edit rate of `hyp` against `reference`, per 100 reference tokens.
pub fn suber(hyp: &SubtitleDoc, reference: &SubtitleDoc) -> Result<SuberReport, MetricError> {
    suber_with(hyp, reference, true)
}

pub fn suber_with(hyp: &SubtitleDoc, reference: &SubtitleDoc, shifts: bool) -> Result<SuberReport, MetricError> {
    let ref_tokens: usize = reference.cues.iter().map(|c| tokenize_cue(c).len()).sum();
    if ref_tokens == 0 {
        return Err(MetricError::EmptyReference);
    }
    let units = units(&hyp.cues, &reference.cues);
    let mut edits = EditCounts::default();
    let mut inserted = Vec::with_capacity(units.len());
    let mut deleted = Vec::with_capacity(units.len());
    for u in &units {
        let ops = align_tokens(&u.hyp, &u.reference);
        edits.add(&edit_counts(&ops));
        inserted.push(bag(&u.hyp, &ops, EditOp::Insert));
        deleted.push(bag(&u.reference, &ops, EditOp::Delete));
    }
    if shifts {
        // A word deleted in one unit and inserted in a neighbouring unit has
        // moved across a boundary: count one shift instead of two edits.
        for i in 0..units.len().saturating_sub(1) {
            let (left_ins, right_ins) = inserted.split_at_mut(i + 1);
            let (left_del, right_del) = deleted.split_at_mut(i + 1);
            let k = take_common(&mut left_del[i], &mut right_ins[0]) + take_common(&mut right_del[0], &mut left_ins[i]);
            edits.deletion -= k;
            edits.insertion -= k;
            edits.shift += k;
        }
    }
    Ok(SuberReport {
        score: 100.0 * edits.total() as f64 / ref_tokens as f64,
        edits,
        ref_tokens,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subtitle::SubtitleFormat;

    fn doc(cues: &[(u64, u64, &str)]) -> SubtitleDoc {
        SubtitleDoc::new(
            SubtitleFormat::Srt,
            cues.iter()
                .enumerate()
                .map(|(i, &(s, e, t))| Cue::new(i as u32 + 1, s, e, t.split('|').map(String::from).collect()))
                .collect(),
        )
    }

    #[test]
    fn identity_is_zero() {
        let d = doc(&[(0, 1000, "hello world"), (1000, 2000, "a|b")]);
        let r = suber(&d, &d).unwrap();
        assert_eq!(r.score, 0.0);
        assert_eq!(r.edits.total(), 0);
        assert_eq!(r.ref_tokens, 7);
    }

    #[test]
    fn one_substitution_in_ten() {
        let reference = doc(&[(0, 1000, "a b c d e f g h i")]);
        let hyp = doc(&[(0, 1000, "a b c d x f g h i")]);
        let r = suber(&hyp, &reference).unwrap();
        assert_eq!(r.ref_tokens, 10);
        assert_eq!(r.edits, EditCounts { substitution: 1, ..Default::default() });
        assert_eq!(r.score, 10.0);
    }

    #[test]
    fn missing_cue() {
        let reference = doc(&[(0, 1000, "a b c d"), (1000, 2000, "e f g h"), (2000, 3000, "i j k l"), (3000, 4000, "m n o p")]);
        let hyp = doc(&[(0, 1000, "a b c d"), (2000, 3000, "i j k l"), (3000, 4000, "m n o p")]);
        let r = suber(&hyp, &reference).unwrap();
        assert_eq!(r.edits, EditCounts { deletion: 5, ..Default::default() });
        assert_eq!(r.score, 25.0);
    }

    #[test]
    fn merged_cue_counts_shifts() {
        let reference = doc(&[(0, 1000, "a b c"), (1000, 2000, "d e")]);
        let hyp = doc(&[(0, 2000, "a b c d e")]);
        let r = suber(&hyp, &reference).unwrap();
        // "d" and "e" moved into the first unit; the second EOB is deleted.
        assert_eq!(r.edits, EditCounts { shift: 2, deletion: 1, ..Default::default() });
        let plain = suber_with(&hyp, &reference, false).unwrap();
        assert_eq!(plain.edits, EditCounts { insertion: 2, deletion: 3, ..Default::default() });
    }

    #[test]
    fn empty_reference_is_an_error() {
        assert_eq!(suber(&doc(&[(0, 1, "a")]), &doc(&[])), Err(MetricError::EmptyReference));
    }

    #[test]
    fn pairing_prefers_larger_overlap_and_earlier_ref_on_ties() {
        let reference = doc(&[(0, 1000, "a"), (1000, 2000, "b")]);
        let hyp = doc(&[(500, 1500, "x")]);
        assert_eq!(pair_cues(&hyp.cues, &reference.cues), vec![(0, 0)]);
        let hyp = doc(&[(800, 1900, "x")]);
        assert_eq!(pair_cues(&hyp.cues, &reference.cues), vec![(0, 1)]);
    }

    #[test]
    fn backtrace_counts_match_distance() {
        let a: Vec<char> = "kitten".chars().collect();
        let b: Vec<char> = "sitting".chars().collect();
        let c = edit_counts(&align_tokens(&a, &b));
        assert_eq!(c.total(), 3);
    }
}
