use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::backends::{prompts, EventScore, MockLlm, TranscriptWord};
use crate::eval::TruthLabel;
use crate::issue::IssueKind;
use crate::lang::cosine_bow;
use crate::lang::normalize_tokens;
use crate::media::{wav, Frame, MediaInfo, AUDIO_FILE, EVENTS_FILE, FRAME_FILE, MANIFEST_FILE, TRANSCRIPT_FILE};
use crate::subtitle::{Cue, SubtitleDoc, SubtitleFormat};

const TRANSCRIPT: &str = include_str!("../../data/cooking_show.srt");

pub const FRAME_WIDTH: usize = 128;
pub const FRAME_HEIGHT: usize = 72;
const SAMPLE_RATE: u64 = 16_000;
const PROFANITY: &str = "damn";
const SWAPS: [(&str, &str); 5] = [
    ("dessert", "desert"),
    ("flour", "flower"),
    ("thyme", "time"),
    ("whole", "hole"),
    ("steak", "stake"),
];
const OFF_TOPIC: [&str; 3] = [
    "Please remember to like and subscribe.",
    "Our sponsor today is a meal kit company.",
    "Check the link below for the full recipe.",
];

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("only {available} cues can carry a {kind} fault, {wanted} requested")]
    NotEnoughCues {
        kind: IssueKind,
        wanted: usize,
        available: usize,
    },
    #[error("io error at {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

/// Number of faults to plant per issue kind.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaultSpec(pub BTreeMap<IssueKind, usize>);

impl FaultSpec {
    pub fn one_each() -> Self {
        FaultSpec(IssueKind::ALL.iter().map(|&k| (k, 1)).collect())
    }

    pub fn none() -> Self {
        FaultSpec::default()
    }

    pub fn only(kind: IssueKind, count: usize) -> Self {
        FaultSpec(BTreeMap::from([(kind, count)]))
    }

    pub fn count(&self, kind: IssueKind) -> usize {
        self.0.get(&kind).copied().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CueAssets {
    pub samples: Vec<i16>,
    pub frame: Frame,
    pub transcript: Vec<TranscriptWord>,
    pub events: Vec<EventScore>,
}

#[derive(Debug)]
pub struct SyntheticCorpus {
    pub reference: SubtitleDoc,
    pub faulted: SubtitleDoc,
    pub labels: Vec<TruthLabel>,
    pub mock: MockLlm,
    pub assets: BTreeMap<u32, CueAssets>,
    pub media: MediaInfo,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusPaths {
    pub reference: PathBuf,
    pub faulted: PathBuf,
    pub labels: PathBuf,
    pub mock_llm: PathBuf,
    pub assets: PathBuf,
}

pub fn bundled_reference() -> SubtitleDoc {
    SubtitleDoc::parse(TRANSCRIPT, SubtitleFormat::Srt).expect("bundled transcript parses")
}

fn is_tag(line: &str) -> bool {
    let t = line.trim();
    t.starts_with('[') && t.ends_with(']')
}

fn spoken_words(cue: &Cue) -> Vec<String> {
    cue.lines
        .iter()
        .filter(|l| !is_tag(l))
        .flat_map(|l| l.split_whitespace().map(str::to_string))
        .collect()
}

fn single_line(cue: &Cue) -> bool {
    cue.lines.len() == 1 && !is_tag(&cue.lines[0])
}

fn swap_for(cue: &Cue) -> Option<(&'static str, &'static str)> {
    let tokens = normalize_tokens(&cue.joined_text());
    SWAPS
        .iter()
        .copied()
        .find(|(right, _)| tokens.iter().filter(|t| t == right).count() == 1 && tokens.len() >= 4)
}

fn eligible(kind: IssueKind, cues: &[Cue], i: usize, max_cpl: usize) -> bool {
    let c = &cues[i];
    match kind {
        IssueKind::ContextualSpelling => swap_for(c).is_some_and(|(r, w)| c.max_line_chars() + w.len() <= max_cpl + r.len()),
        IssueKind::HarmfulWord => single_line(c) && c.lines[0].split_whitespace().count() >= 3 && c.max_line_chars() + PROFANITY.len() < max_cpl,
        IssueKind::TimeSync => single_line(c) && c.lines[0].split_whitespace().count() >= 4,
        IssueKind::NonWord => c.lines.len() >= 2 && is_tag(c.lines.last().unwrap()),
        IssueKind::Segmentation => cues.get(i + 1).is_some_and(|next| {
            single_line(c)
                && single_line(next)
                && c.end == next.start
                && c.lines[0].chars().count() + 1 + next.lines[0].chars().count() > max_cpl
        }),
        IssueKind::Positioning | IssueKind::FontColor => true,
    }
}

enum Frame3 {
    Clean,
    Salient,
    Bright,
}

fn make_frame(cue_id: u32, kind: Frame3, rng: &mut ChaCha8Rng) -> Frame {
    let (bg, lo, hi) = match kind {
        Frame3::Bright => (228u8, 200u8, 255u8),
        _ => (30, 0, 60),
    };
    let mut f = Frame::filled(cue_id, FRAME_WIDTH, FRAME_HEIGHT, [bg; 3]);
    for y in 0..30 {
        for x in 0..FRAME_WIDTH {
            let v = rng.gen_range(lo..=hi);
            f.set_pixel(x, y, [v, v, v]);
        }
    }
    if let Frame3::Salient = kind {
        f.fill_rect(50, 60, 78, 68, [255, 255, 255]);
    }
    f
}

fn tone(duration_ms: u64) -> Vec<i16> {
    let n = duration_ms * SAMPLE_RATE / 1000;
    (0..n)
        .map(|i| ((i as f64 * 2.0 * std::f64::consts::PI * 220.0 / SAMPLE_RATE as f64).sin() * 800.0) as i16)
        .collect()
}

/// Spreads words evenly over `[from, to)` milliseconds.
fn timed(words: &[String], from: u64, to: u64) -> Vec<TranscriptWord> {
    let n = words.len() as u64;
    words
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let i = i as u64;
            let start = from + (to - from) * i / n;
            let end = (from + (to - from) * (i + 1) / n).max(start + 1);
            TranscriptWord {
                text: w.clone(),
                start_ms: start,
                end_ms: end,
                confidence: 1.0,
            }
        })
        .collect()
}

struct Planted {
    cue: Cue,
    fault: Option<IssueKind>,
    transcript: Vec<TranscriptWord>,
    music: bool,
    finding: Option<(String, String)>,
}

/// Builds a reference document, a copy with planted faults, and the offline
/// assets and mock model answers under which every fault is detectable.
pub fn make_synthetic_corpus(seed: u64, spec: &FaultSpec) -> Result<SyntheticCorpus, CorpusError> {
    let max_cpl = crate::lang::segmentation::DEFAULT_MAX_CPL;
    let reference = bundled_reference();
    let cues = &reference.cues;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut used: BTreeSet<usize> = BTreeSet::new();
    let mut chosen: BTreeMap<usize, IssueKind> = BTreeMap::new();
    for kind in IssueKind::ALL {
        let wanted = spec.count(kind);
        if wanted == 0 {
            continue;
        }
        let free = |i: usize| !used.contains(&i) && (kind != IssueKind::Segmentation || !used.contains(&(i + 1)));
        let mut pool: Vec<usize> = (0..cues.len()).filter(|&i| free(i) && eligible(kind, cues, i, max_cpl)).collect();
        pool.shuffle(&mut rng);
        let mut picked = Vec::new();
        for i in pool {
            if picked.len() == wanted {
                break;
            }
            let clash = kind == IssueKind::Segmentation && picked.iter().any(|&p: &usize| p.abs_diff(i) <= 1);
            if !clash {
                picked.push(i);
            }
        }
        if picked.len() < wanted {
            return Err(CorpusError::NotEnoughCues {
                kind,
                wanted,
                available: picked.len(),
            });
        }
        for i in picked {
            used.insert(i);
            if kind == IssueKind::Segmentation {
                used.insert(i + 1);
            }
            chosen.insert(i, kind);
        }
    }

    let mut planted: Vec<Planted> = Vec::new();
    let mut i = 0;
    while i < cues.len() {
        let original = &cues[i];
        let mut cue = original.clone();
        let words = spoken_words(original);
        let mut transcript = timed(&words, 0, original.duration_ms());
        let music = original.lines.last().is_some_and(|l| is_tag(l));
        let mut finding = None;
        let fault = chosen.get(&i).copied();
        match fault {
            Some(IssueKind::ContextualSpelling) => {
                let (right, wrong) = swap_for(original).expect("eligible");
                cue.lines = original
                    .lines
                    .iter()
                    .map(|l| {
                        l.split(' ')
                            .map(|w| if normalize_tokens(w) == [right] { w.replacen(right, wrong, 1) } else { w.to_string() })
                            .collect::<Vec<_>>()
                            .join(" ")
                    })
                    .collect();
                finding = Some((wrong.to_string(), right.to_string()));
            }
            Some(IssueKind::HarmfulWord) => {
                let mut ws: Vec<&str> = original.lines[0].split(' ').collect();
                ws.insert(1, PROFANITY);
                cue.lines = vec![ws.join(" ")];
                transcript = timed(&spoken_words(&cue), 0, cue.duration_ms());
            }
            Some(IssueKind::TimeSync) => {
                let mut options = OFF_TOPIC.to_vec();
                options.shuffle(&mut rng);
                let text = options
                    .into_iter()
                    .find(|t| cosine_bow::<f64, _>(&normalize_tokens(t), &normalize_tokens(&original.joined_text())) < 0.5)
                    .expect("an unrelated sentence exists");
                cue.lines = vec![text.to_string()];
            }
            Some(IssueKind::NonWord) => {
                cue.lines.pop();
            }
            Some(IssueKind::Segmentation) => {
                let next = &cues[i + 1];
                cue.end = next.end;
                cue.lines = vec![format!("{} {}", original.lines[0], next.lines[0])];
                let offset = next.start.0 - original.start.0;
                transcript.extend(timed(&spoken_words(next), offset, offset + next.duration_ms()));
                i += 1;
            }
            _ => {}
        }
        planted.push(Planted {
            cue,
            fault,
            transcript,
            music,
            finding,
        });
        i += 1;
    }

    let mut faulted = SubtitleDoc::new(SubtitleFormat::Srt, planted.iter().map(|p| p.cue.clone()).collect());
    faulted.renumber();
    // Prompts are built from the document as it will be read back from disk.
    let faulted = SubtitleDoc::parse(&faulted.serialize(), SubtitleFormat::Srt).expect("faulted doc parses");

    let mut mock = MockLlm::new();
    let mut labels = Vec::new();
    let mut assets = BTreeMap::new();
    for (idx, (p, cue)) in planted.iter().zip(&faulted.cues).enumerate() {
        let context = &faulted.cues[idx.saturating_sub(3)..idx];
        let text = cue.joined_text();
        let findings = match &p.finding {
            Some((wrong, right)) => {
                let start = text.find(wrong.as_str()).map(|b| text[..b].chars().count()).expect("swapped word present");
                mock.insert(
                    &prompts::spell_fix(cue, context, wrong),
                    json!({"candidates": [right, format!("{wrong}s"), wrong]}),
                );
                json!([{
                    "word": wrong,
                    "start": start,
                    "end": start + wrong.chars().count(),
                    "rationale": format!("{wrong:?} does not fit a cooking context; {right:?} does")
                }])
            }
            None => json!([]),
        };
        mock.insert(&prompts::spell_findings(cue, context), json!({ "findings": findings }));
        let spans = if p.fault == Some(IssueKind::HarmfulWord) {
            let b = text.find(PROFANITY).expect("planted word present");
            let start = text[..b].chars().count();
            json!([{"start": start, "end": start + PROFANITY.len()}])
        } else {
            json!([])
        };
        mock.insert(&prompts::harm_spans(cue), json!({ "spans": spans }));

        if let Some(kind) = p.fault {
            labels.push(TruthLabel {
                cue_id: cue.id,
                kind,
                truth: true,
            });
        }
        let frame_kind = match p.fault {
            Some(IssueKind::Positioning) => Frame3::Salient,
            Some(IssueKind::FontColor) => Frame3::Bright,
            _ => Frame3::Clean,
        };
        let events = if p.music {
            vec![
                EventScore { label: "Music".into(), score: 0.71 },
                EventScore { label: "Speech".into(), score: 0.2 },
                EventScore { label: "Music".into(), score: 0.64 },
            ]
        } else {
            vec![
                EventScore { label: "Speech".into(), score: 0.86 },
                EventScore { label: "Music".into(), score: round3(rng.gen_range(0.02..0.2)) },
                EventScore { label: "Chopping (food)".into(), score: round3(rng.gen_range(0.02..0.25)) },
            ]
        };
        assets.insert(
            cue.id,
            CueAssets {
                samples: tone(cue.duration_ms()),
                frame: make_frame(cue.id, frame_kind, &mut rng),
                transcript: p.transcript.clone(),
                events,
            },
        );
    }
    labels.sort_by_key(|l| (l.cue_id, l.kind));
    let media = MediaInfo {
        duration_ms: faulted.cues.last().map_or(0, |c| c.end.0) + 1000,
        width: FRAME_WIDTH as u32,
        height: FRAME_HEIGHT as u32,
        fps: 25.0,
    };
    Ok(SyntheticCorpus {
        reference,
        faulted,
        labels,
        mock,
        assets,
        media,
    })
}

fn round3(v: f64) -> f64 {
    (v * 1000.0).round() / 1000.0
}

fn write(path: &Path, bytes: impl AsRef<[u8]>) -> Result<(), CorpusError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|source| CorpusError::Io {
            path: parent.to_path_buf(),
            source,
        })?;
    }
    std::fs::write(path, bytes).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })
}

impl SyntheticCorpus {
    /// Writes `ref.srt`, `faulted.srt`, `labels.json`, `mock_llm.json` and
    /// the `assets/` tree under `dir`.
    pub fn write(&self, dir: &Path) -> Result<CorpusPaths, CorpusError> {
        let paths = CorpusPaths {
            reference: dir.join("ref.srt"),
            faulted: dir.join("faulted.srt"),
            labels: dir.join("labels.json"),
            mock_llm: dir.join("mock_llm.json"),
            assets: dir.join("assets"),
        };
        let pretty = |v: &dyn erased::Ser| v.to_pretty();
        write(&paths.reference, self.reference.serialize())?;
        write(&paths.faulted, self.faulted.serialize())?;
        write(&paths.labels, pretty(&self.labels))?;
        write(&paths.mock_llm, self.mock.to_json())?;
        write(&paths.assets.join(MANIFEST_FILE), pretty(&self.media))?;
        for (id, a) in &self.assets {
            let d = paths.assets.join(id.to_string());
            write(&d.join(AUDIO_FILE), wav::encode(&a.samples))?;
            write(&d.join(FRAME_FILE), a.frame.to_ppm())?;
            write(&d.join(TRANSCRIPT_FILE), pretty(&a.transcript))?;
            write(&d.join(EVENTS_FILE), pretty(&a.events))?;
        }
        Ok(paths)
    }
}

mod erased {
    pub trait Ser {
        fn to_pretty(&self) -> String;
    }

    impl<T: serde::Serialize> Ser for T {
        fn to_pretty(&self) -> String {
            serde_json::to_string_pretty(self).expect("corpus data serializes") + "\n"
        }
    }
}
