use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::issue::{Issue, IssueKind};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetectionLabel {
    pub cue_id: u32,
    pub kind: IssueKind,
    pub truth: bool,
    #[serde(default)]
    pub predicted: bool,
}

/// Ground-truth entry as stored in label files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruthLabel {
    pub cue_id: u32,
    pub kind: IssueKind,
    pub truth: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
}

impl Confusion {
    pub fn of(labels: &[DetectionLabel]) -> Self {
        let mut c = Confusion::default();
        for l in labels {
            match (l.truth, l.predicted) {
                (true, true) => c.tp += 1,
                (false, true) => c.fp += 1,
                (true, false) => c.fn_ += 1,
                (false, false) => {}
            }
        }
        c
    }

    pub fn f1<T: Scalar>(&self) -> T {
        let tp = T::from_usize_lossy(self.tp);
        let p_den = T::from_usize_lossy(self.tp + self.fp);
        let r_den = T::from_usize_lossy(self.tp + self.fn_);
        if p_den == T::zero() || r_den == T::zero() {
            return T::zero();
        }
        let (p, r) = (tp / p_den, tp / r_den);
        if p + r == T::zero() {
            T::zero()
        } else {
            T::from_f64_lossy(2.0) * p * r / (p + r)
        }
    }
}

pub fn f1<T: Scalar>(labels: &[DetectionLabel]) -> T {
    Confusion::of(labels).f1()
}

/// Joins ground truth with report issues. Every (cue, kind) that is true in
/// either source yields one label.
pub fn label_predictions(truth: &[TruthLabel], issues: &[Issue]) -> Vec<DetectionLabel> {
    let positives: BTreeSet<(u32, IssueKind)> = truth.iter().filter(|t| t.truth).map(|t| (t.cue_id, t.kind)).collect();
    let predicted: BTreeSet<(u32, IssueKind)> = issues.iter().map(|i| (i.cue_id, i.kind)).collect();
    positives
        .union(&predicted)
        .map(|&(cue_id, kind)| DetectionLabel {
            cue_id,
            kind,
            truth: positives.contains(&(cue_id, kind)),
            predicted: predicted.contains(&(cue_id, kind)),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KindScore {
    pub confusion: Confusion,
    pub f1: f64,
}

pub fn f1_by_kind(labels: &[DetectionLabel]) -> BTreeMap<IssueKind, KindScore> {
    let mut by: BTreeMap<IssueKind, Vec<DetectionLabel>> = BTreeMap::new();
    for l in labels {
        by.entry(l.kind).or_default().push(l.clone());
    }
    by.into_iter()
        .map(|(k, ls)| {
            let confusion = Confusion::of(&ls);
            (k, KindScore { confusion, f1: confusion.f1() })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn label(truth: bool, predicted: bool) -> DetectionLabel {
        DetectionLabel { cue_id: 1, kind: IssueKind::Positioning, truth, predicted }
    }

    #[test]
    fn examples() {
        assert_eq!(f1::<f64>(&[label(true, true), label(false, false)]), 1.0);
        assert_eq!(f1::<f64>(&[label(true, false), label(true, false)]), 0.0);
        let mut ls = vec![label(true, true); 4];
        ls.push(label(false, true));
        ls.push(label(true, false));
        assert!((f1::<f64>(&ls) - 0.8).abs() < 1e-12);
        assert!((f1::<f32>(&ls) - 0.8).abs() < 1e-6);
    }

    proptest! {
        #[test]
        fn matches_confusion_arithmetic(pairs in prop::collection::vec((any::<bool>(), any::<bool>()), 1..60)) {
            let ls: Vec<_> = pairs.iter().map(|&(t, p)| label(t, p)).collect();
            let tp = pairs.iter().filter(|&&(t, p)| t && p).count() as f64;
            let fp = pairs.iter().filter(|&&(t, p)| !t && p).count() as f64;
            let fn_ = pairs.iter().filter(|&&(t, p)| t && !p).count() as f64;
            let want = if tp == 0.0 { 0.0 } else { 2.0 * tp / (2.0 * tp + fp + fn_) };
            prop_assert!((f1::<f64>(&ls) - want).abs() < 1e-12);
        }
    }
}
