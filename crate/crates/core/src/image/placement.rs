use serde::{Deserialize, Serialize};

use crate::image::SaliencyMap;
use crate::issue::{CandidateScore, Evidence, Issue, IssueKind, Suggestion};
use crate::region::Region;
use crate::scalar::Scalar;

pub const DEFAULT_OVERLAP_THRESHOLD: f64 = 0.006;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedRegion {
    pub name: String,
    pub region: Region,
}

impl NamedRegion {
    pub fn new(name: &str, x: f64, y: f64, w: f64, h: f64) -> Self {
        NamedRegion {
            name: name.to_string(),
            region: Region::new(x, y, w, h).expect("valid ladder region"),
        }
    }
}

/// Candidate positions in preference order.
pub fn default_ladder() -> Vec<NamedRegion> {
    vec![
        NamedRegion::new("bottom-center", 0.2, 0.85, 0.6, 0.1),
        NamedRegion::new("middle-center", 0.2, 0.45, 0.6, 0.1),
        NamedRegion::new("top-center", 0.2, 0.05, 0.6, 0.1),
        NamedRegion::new("bottom-left", 0.0, 0.85, 0.6, 0.1),
        NamedRegion::new("bottom-right", 0.4, 0.85, 0.6, 0.1),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacementResult {
    pub default_score: f64,
    pub chosen: NamedRegion,
    pub scores: Vec<CandidateScore>,
    pub flagged: bool,
}

pub fn exceeds_overlap(score: f64, threshold: f64) -> bool {
    score > threshold
}

/// Scores the default region and every candidate; the lowest-scoring
/// candidate is chosen, the earliest one on ties.
pub fn place<T: Scalar>(map: &SaliencyMap<T>, default: &Region, ladder: &[NamedRegion], threshold: f64) -> PlacementResult {
    let default_score = map.overlap_score(default).to_f64_lossy();
    let scores: Vec<CandidateScore> = ladder
        .iter()
        .map(|c| CandidateScore {
            name: c.name.clone(),
            region: c.region,
            score: map.overlap_score(&c.region).to_f64_lossy(),
        })
        .collect();
    let mut best = 0;
    for (i, s) in scores.iter().enumerate() {
        if s.score < scores[best].score {
            best = i;
        }
    }
    let chosen = ladder.get(best).cloned().unwrap_or(NamedRegion {
        name: "default".into(),
        region: *default,
    });
    PlacementResult {
        default_score,
        chosen,
        scores,
        flagged: exceeds_overlap(default_score, threshold),
    }
}

pub fn detect_positioning<T: Scalar>(
    cue_id: u32,
    map: &SaliencyMap<T>,
    default: &Region,
    ladder: &[NamedRegion],
    threshold: f64,
) -> (PlacementResult, Option<Issue>) {
    let result = place(map, default, ladder, threshold);
    if !result.flagged {
        return (result, None);
    }
    let suggestion = if result.chosen.region == *default {
        Suggestion::None
    } else {
        Suggestion::MoveRegion {
            region: result.chosen.region,
        }
    };
    let issue = Issue::new(
        cue_id,
        IssueKind::Positioning,
        Evidence::Positioning {
            default_score: result.default_score,
            threshold,
            candidates: result.scores.clone(),
            chosen: result.chosen.name.clone(),
        },
        suggestion,
    );
    (result, Some(issue))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn band_map(band_value: f64) -> SaliencyMap<f64> {
        // One cell inside the default band holds `band_value`; the rest of the
        // mass sits in the top-left corner.
        let mut values = vec![0.0; 64 * 64];
        values[56 * 64 + 32] = band_value;
        values[0] = 1.0 - band_value;
        SaliencyMap::from_values(64, 64, values).unwrap()
    }

    #[test]
    fn threshold_is_strict() {
        let t = DEFAULT_OVERLAP_THRESHOLD;
        let band = Region::default_band();
        let at = place(&band_map(t), &band, &default_ladder(), t);
        assert_eq!(at.default_score, 0.006);
        assert!(!at.flagged);
        let above = place(&band_map(f64::from_bits(t.to_bits() + 1)), &band, &default_ladder(), t);
        assert!(above.flagged);
    }

    #[test]
    fn uniform_map_prefers_fewest_cells() {
        let map = SaliencyMap::<f64>::uniform(64, 64);
        let (result, issue) = detect_positioning(1, &map, &Region::default_band(), &default_ladder(), 0.006);
        assert!(result.flagged);
        assert!((result.default_score - 0.0649).abs() < 1e-3);
        // the middle band covers six cell rows, the others seven
        assert_eq!(result.chosen.name, "middle-center");
        let scores: Vec<f64> = result.scores.iter().map(|s| s.score).collect();
        assert_eq!(scores, vec![266.0 / 4096.0, 228.0 / 4096.0, 266.0 / 4096.0, 266.0 / 4096.0, 266.0 / 4096.0]);
        assert!(matches!(issue.unwrap().suggestion, Suggestion::MoveRegion { .. }));
    }

    #[test]
    fn blob_in_bottom_band_moves_up() {
        let mut values = vec![0.0; 64 * 64];
        for y in 54..61 {
            for x in 20..44 {
                values[y * 64 + x] = 1.0;
            }
        }
        let map = SaliencyMap::normalized(64, 64, values);
        let (result, issue) = detect_positioning(3, &map, &Region::default_band(), &default_ladder(), 0.006);
        assert!(result.flagged);
        assert_eq!(result.chosen.name, "middle-center");
        let issue = issue.unwrap();
        assert_eq!(issue.issue_id, "0003-positioning");
        assert!(matches!(issue.suggestion, Suggestion::MoveRegion { .. }));
    }

    proptest! {
        #[test]
        fn chosen_is_minimal(values in prop::collection::vec(0.0f64..1.0, 64 * 64)) {
            let map = SaliencyMap::normalized(64, 64, values);
            let result = place(&map, &Region::default_band(), &default_ladder(), 0.006);
            let min = result.scores.iter().map(|s| s.score).fold(f64::INFINITY, f64::min);
            let chosen = result.scores.iter().find(|s| s.name == result.chosen.name).unwrap();
            prop_assert_eq!(chosen.score, min);
            let first_min = result.scores.iter().position(|s| s.score == min).unwrap();
            prop_assert_eq!(&result.scores[first_min].name, &result.chosen.name);
        }
    }
}
