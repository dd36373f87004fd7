use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::backends::{
    AssetEventClassifier, AssetTranscriber, AudioEventClassifier, Backends, HttpConfig, HttpEventClassifier, HttpLlm,
    HttpTranscriber, LabelTable, LlmBackend, MockLlm, Transcriber,
};
use crate::image::{default_ladder, ImageConfig, NamedRegion, DEFAULT_BRIGHTNESS_THRESHOLD, DEFAULT_OVERLAP_THRESHOLD};
use crate::issue::FontColor;
use crate::lang::LanguageConfig;
use crate::media::{ExternalMedia, MediaCommands, MediaSource, OfflineAssets};
use crate::region::Region;

/// Detector toggles (`detect.*`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectFlags {
    pub spelling: bool,
    pub harmful: bool,
    pub timesync: bool,
    pub nonword: bool,
    pub segmentation: bool,
    pub positioning: bool,
    pub fontcolor: bool,
}

impl Default for DetectFlags {
    fn default() -> Self {
        DetectFlags::all(true)
    }
}

impl DetectFlags {
    pub fn all(on: bool) -> Self {
        DetectFlags {
            spelling: on,
            harmful: on,
            timesync: on,
            nonword: on,
            segmentation: on,
            positioning: on,
            fontcolor: on,
        }
    }

    /// Parses a comma-separated list of issue kinds, `all` or `none`.
    pub fn from_list(list: &str) -> Result<Self, PipelineError> {
        let mut flags = DetectFlags::all(false);
        for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match item {
                "all" => flags = DetectFlags::all(true),
                "none" => {}
                other => {
                    let kind: crate::issue::IssueKind = other.parse().map_err(PipelineError::Config)?;
                    flags.set(kind, true);
                }
            }
        }
        Ok(flags)
    }

    pub fn set(&mut self, kind: crate::issue::IssueKind, on: bool) {
        use crate::issue::IssueKind::*;
        let slot = match kind {
            ContextualSpelling => &mut self.spelling,
            HarmfulWord => &mut self.harmful,
            TimeSync => &mut self.timesync,
            NonWord => &mut self.nonword,
            Segmentation => &mut self.segmentation,
            Positioning => &mut self.positioning,
            FontColor => &mut self.fontcolor,
        };
        *slot = on;
    }

    fn any_language(&self) -> bool {
        self.spelling || self.harmful || self.timesync || self.nonword || self.segmentation
    }

    fn needs_audio(&self) -> bool {
        self.timesync || self.nonword || self.segmentation
    }

    fn needs_frames(&self) -> bool {
        self.positioning || self.fontcolor
    }
}

/// Decision thresholds (`thresholds.*`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    pub timesync: f64,
    pub event: f64,
    pub cpl: usize,
    pub overlap: f64,
    pub brightness: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            timesync: crate::lang::timesync::DEFAULT_THRESHOLD,
            event: crate::lang::nonword::DEFAULT_THRESHOLD,
            cpl: crate::lang::segmentation::DEFAULT_MAX_CPL,
            overlap: DEFAULT_OVERLAP_THRESHOLD,
            brightness: DEFAULT_BRIGHTNESS_THRESHOLD,
        }
    }
}

/// Subtitle placement settings (`region.*`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RegionConfig {
    pub default: Region,
    pub ladder: Vec<NamedRegion>,
    pub current_color: FontColor,
}

impl Default for RegionConfig {
    fn default() -> Self {
        RegionConfig {
            default: Region::default_band(),
            ladder: default_ladder(),
            current_color: FontColor::White,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LlmChoice {
    Mock,
    Http,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AudioModelChoice {
    Assets,
    Http,
}

/// Model backend selection (`backend.*`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BackendConfig {
    pub llm: LlmChoice,
    pub asr: AudioModelChoice,
    pub events: AudioModelChoice,
    /// Prompt-hash table for the mock LLM; without one every prompt gets an
    /// empty answer.
    pub mock_table: Option<PathBuf>,
    pub llm_http: Option<HttpConfig>,
    pub asr_http: Option<HttpConfig>,
    pub events_http: Option<HttpConfig>,
    pub labels: Option<PathBuf>,
}

impl Default for BackendConfig {
    fn default() -> Self {
        BackendConfig {
            llm: LlmChoice::Mock,
            asr: AudioModelChoice::Assets,
            events: AudioModelChoice::Assets,
            mock_table: None,
            llm_http: None,
            asr_http: None,
            events_http: None,
            labels: None,
        }
    }
}

/// Everything one `check` or `fix` run needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub video: Option<PathBuf>,
    pub subs: PathBuf,
    pub assets: Option<PathBuf>,
    pub out: PathBuf,
    pub parallelism: usize,
    pub context_cues: usize,
    pub detect: DetectFlags,
    pub thresholds: Thresholds,
    pub region: RegionConfig,
    pub backend: BackendConfig,
    pub media: MediaCommands,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            video: None,
            subs: PathBuf::new(),
            assets: None,
            out: PathBuf::from("vsat-out"),
            parallelism: 4,
            context_cues: 3,
            detect: DetectFlags::default(),
            thresholds: Thresholds::default(),
            region: RegionConfig::default(),
            backend: BackendConfig::default(),
            media: MediaCommands::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, PipelineError> {
        toml::from_str(text).map_err(|e| PipelineError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path).map_err(|e| PipelineError::io(path, e))?;
        let mut config = Self::from_toml(&text)?;
        config.resolve_relative_to(path.parent().unwrap_or(Path::new(".")));
        Ok(config)
    }

    /// Makes config-file paths relative to the config file's directory.
    fn resolve_relative_to(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if !p.as_os_str().is_empty() && p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.subs);
        fix(&mut self.out);
        for p in [&mut self.video, &mut self.assets, &mut self.backend.mock_table, &mut self.backend.labels]
            .into_iter()
            .flatten()
        {
            fix(p);
        }
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let t = &self.thresholds;
        let positive = [
            ("thresholds.timesync", t.timesync),
            ("thresholds.event", t.event),
            ("thresholds.overlap", t.overlap),
            ("thresholds.brightness", t.brightness),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(PipelineError::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if t.cpl == 0 {
            return Err(PipelineError::Config("thresholds.cpl must be positive".into()));
        }
        if self.parallelism == 0 {
            return Err(PipelineError::Config("parallelism must be at least 1".into()));
        }
        if !self.region.default.is_valid() || self.region.ladder.iter().any(|n| !n.region.is_valid()) {
            return Err(PipelineError::Config("regions must lie inside the unit square".into()));
        }
        if self.subs.as_os_str().is_empty() {
            return Err(PipelineError::Config("no subtitle file given".into()));
        }
        Ok(())
    }

    pub fn language(&self) -> LanguageConfig {
        let d = &self.detect;
        LanguageConfig {
            spelling: d.spelling,
            harmful: d.harmful,
            time_sync: d.timesync,
            non_word: d.nonword,
            segmentation: d.segmentation,
            sync_threshold: self.thresholds.timesync,
            event_threshold: self.thresholds.event,
            max_cpl: self.thresholds.cpl,
            context_cues: self.context_cues,
        }
    }

    pub fn image(&self) -> ImageConfig {
        ImageConfig {
            positioning: self.detect.positioning,
            font_color: self.detect.fontcolor,
            overlap_threshold: self.thresholds.overlap,
            brightness_threshold: self.thresholds.brightness,
            default_region: self.region.default,
            ladder: self.region.ladder.clone(),
            current_color: self.region.current_color,
        }
    }

    pub(crate) fn runs_language(&self) -> bool {
        self.detect.any_language()
    }

    pub(crate) fn needs_audio(&self) -> bool {
        self.detect.needs_audio()
    }

    pub(crate) fn needs_frames(&self) -> bool {
        self.detect.needs_frames()
    }

    /// Asset directory for offline media, or the extraction cache when an
    /// external media processor is used.
    pub fn asset_root(&self) -> PathBuf {
        self.assets.clone().unwrap_or_else(|| self.out.join("media"))
    }

    pub fn media_source(&self) -> Result<Box<dyn MediaSource>, PipelineError> {
        match (&self.assets, &self.video) {
            (Some(dir), _) => Ok(Box::new(OfflineAssets::new(dir))),
            (None, Some(video)) => Ok(Box::new(ExternalMedia::new(video, self.asset_root(), &self.media)?)),
            (None, None) => Err(PipelineError::Config("media needed: pass an asset directory or a video".into())),
        }
    }

    pub fn backends(&self) -> Result<Backends, PipelineError> {
        let b = &self.backend;
        let http = |cfg: &Option<HttpConfig>, name: &str| {
            cfg.clone()
                .ok_or_else(|| PipelineError::Config(format!("backend.{name} = \"http\" needs backend.{name}_http")))
        };
        let llm: Arc<dyn LlmBackend> = match b.llm {
            LlmChoice::Mock => Arc::new(match &b.mock_table {
                Some(path) => MockLlm::load(path)?,
                None => MockLlm::silent(),
            }),
            LlmChoice::Http => {
                let cfg = match &b.llm_http {
                    Some(c) => c.clone(),
                    None => HttpConfig::llm_from_env()?,
                };
                Arc::new(HttpLlm::new(cfg)?)
            }
        };
        let labels = match &b.labels {
            Some(path) => {
                LabelTable::from_lines(&std::fs::read_to_string(path).map_err(|e| PipelineError::io(path, e))?)
            }
            None => LabelTable::builtin(),
        };
        let root = self.asset_root();
        let asr: Arc<dyn Transcriber> = match b.asr {
            AudioModelChoice::Assets => Arc::new(AssetTranscriber::new(&root)),
            AudioModelChoice::Http => Arc::new(HttpTranscriber::new(http(&b.asr_http, "asr")?)?),
        };
        let events: Arc<dyn AudioEventClassifier> = match b.events {
            AudioModelChoice::Assets => Arc::new(AssetEventClassifier::new(&root, labels)),
            AudioModelChoice::Http => Arc::new(HttpEventClassifier::new(http(&b.events_http, "events")?, labels)?),
        };
        Ok(Backends { llm, asr, events })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dotted_keys() {
        let c = RunConfig::from_toml(
            r#"
subs = "in.srt"
parallelism = 2
detect.spelling = false
thresholds.cpl = 42
thresholds.overlap = 0.01
backend.llm = "mock"
media.audio_cmd = "tool {in} {start} {end} {out}"
"#,
        )
        .unwrap();
        assert!(!c.detect.spelling && c.detect.harmful);
        assert_eq!(c.thresholds.cpl, 42);
        assert_eq!(c.thresholds.timesync, 0.7);
        assert_eq!(c.parallelism, 2);
        assert_eq!(c.language().max_cpl, 42);
        assert_eq!(c.image().overlap_threshold, 0.01);
        c.validate().unwrap();
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(matches!(RunConfig::from_toml("detect.spellling = true"), Err(PipelineError::Config(_))));
    }

    #[test]
    fn invalid_values() {
        let mut c = RunConfig {
            subs: "a.srt".into(),
            ..RunConfig::default()
        };
        c.validate().unwrap();
        c.parallelism = 0;
        assert!(c.validate().is_err());
        c.parallelism = 1;
        c.thresholds.overlap = 0.0;
        assert!(c.validate().is_err());
        c.thresholds.overlap = 0.006;
        c.subs = PathBuf::new();
        assert!(c.validate().is_err());
    }

    #[test]
    fn detect_lists() {
        assert_eq!(DetectFlags::from_list("none").unwrap(), DetectFlags::all(false));
        assert_eq!(DetectFlags::from_list("all").unwrap(), DetectFlags::all(true));
        let f = DetectFlags::from_list("segmentation, fontcolor").unwrap();
        assert!(f.segmentation && f.fontcolor && !f.spelling);
        assert!(DetectFlags::from_list("spellcheck").is_err());
    }

    #[test]
    fn relative_paths_follow_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, "subs = \"x.srt\"\nassets = \"assets\"\n").unwrap();
        let c = RunConfig::load(&path).unwrap();
        assert_eq!(c.subs, dir.path().join("x.srt"));
        assert_eq!(c.assets, Some(dir.path().join("assets")));
    }
}
