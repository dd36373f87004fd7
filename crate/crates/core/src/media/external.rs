use std::path::{Path, PathBuf};
use std::process::Command;

use serde::{Deserialize, Serialize};

use super::{AudioClip, Frame, MediaError, MediaInfo, MediaSource, AUDIO_FILE, FRAME_FILE};
use crate::subtitle::Timecode;

const PLACEHOLDERS: [&str; 4] = ["in", "start", "end", "out"];

/// A whitespace-separated argv template with `{in}`, `{start}`, `{end}` and
/// `{out}` placeholders. No shell is involved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandTemplate {
    argv: Vec<String>,
}

impl CommandTemplate {
    pub fn parse(template: &str) -> Result<Self, MediaError> {
        let argv: Vec<String> = template.split_whitespace().map(str::to_string).collect();
        if argv.is_empty() {
            return Err(MediaError::Config("empty command template".into()));
        }
        for arg in &argv {
            let mut rest = arg.as_str();
            while let Some(open) = rest.find('{') {
                let after = &rest[open + 1..];
                let close = after.find('}').ok_or_else(|| {
                    MediaError::Config(format!("unterminated placeholder in {arg:?}"))
                })?;
                let name = &after[..close];
                if !PLACEHOLDERS.contains(&name) {
                    return Err(MediaError::Config(format!(
                        "unknown placeholder {{{name}}} in template {template:?}"
                    )));
                }
                rest = &after[close + 1..];
            }
        }
        Ok(CommandTemplate { argv })
    }

    pub fn render(&self, input: &Path, start: Timecode, end: Timecode, out: &Path) -> Vec<String> {
        let input = input.to_string_lossy();
        let out = out.to_string_lossy();
        let (start, end) = (start.to_seconds_string(), end.to_seconds_string());
        self.argv
            .iter()
            .map(|a| {
                a.replace("{in}", &input)
                    .replace("{start}", &start)
                    .replace("{end}", &end)
                    .replace("{out}", &out)
            })
            .collect()
    }
}

/// Config-level command strings (`media.audio_cmd`, `media.frame_cmd`,
/// `media.probe_cmd`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct MediaCommands {
    pub audio_cmd: String,
    pub frame_cmd: String,
    pub probe_cmd: String,
}

impl Default for MediaCommands {
    fn default() -> Self {
        MediaCommands {
            audio_cmd: "ffmpeg -nostdin -y -loglevel error -ss {start} -to {end} -i {in} -ac 1 -ar 16000 -c:a pcm_s16le -f wav {out}".into(),
            frame_cmd: "ffmpeg -nostdin -y -loglevel error -ss {start} -i {in} -frames:v 1 -c:v ppm -f image2 {out}".into(),
            probe_cmd: "ffprobe -v error -print_format json -show_format -show_streams {in}".into(),
        }
    }
}

/// Drives an external media processor. Every output lands under
/// `cache_dir/<cue_id>/`.
#[derive(Debug, Clone)]
pub struct ExternalMedia {
    video: PathBuf,
    cache_dir: PathBuf,
    audio: CommandTemplate,
    frame: CommandTemplate,
    probe: CommandTemplate,
}

impl ExternalMedia {
    pub fn new(
        video: impl Into<PathBuf>,
        cache_dir: impl Into<PathBuf>,
        commands: &MediaCommands,
    ) -> Result<Self, MediaError> {
        Ok(ExternalMedia {
            video: video.into(),
            cache_dir: cache_dir.into(),
            audio: CommandTemplate::parse(&commands.audio_cmd)?,
            frame: CommandTemplate::parse(&commands.frame_cmd)?,
            probe: CommandTemplate::parse(&commands.probe_cmd)?,
        })
    }

    fn run(&self, argv: &[String]) -> Result<Vec<u8>, MediaError> {
        let output = Command::new(&argv[0])
            .args(&argv[1..])
            .output()
            .map_err(|e| MediaError::Tool {
                status: "spawn failure".into(),
                stderr: format!("{}: {e}", argv[0]),
            })?;
        if !output.status.success() {
            return Err(MediaError::Tool {
                status: output.status.to_string(),
                stderr: String::from_utf8_lossy(&output.stderr).trim().to_string(),
            });
        }
        Ok(output.stdout)
    }

    fn output_path(&self, cue_id: u32, name: &str) -> Result<PathBuf, MediaError> {
        let dir = self.cache_dir.join(cue_id.to_string());
        std::fs::create_dir_all(&dir).map_err(|e| MediaError::io(&dir, e))?;
        Ok(dir.join(name))
    }

    fn require_video(&self) -> Result<(), MediaError> {
        if self.video.exists() {
            Ok(())
        } else {
            Err(MediaError::NotFound(self.video.clone()))
        }
    }
}

impl MediaSource for ExternalMedia {
    fn probe(&self) -> Result<MediaInfo, MediaError> {
        self.require_video()?;
        let argv = self.probe.render(&self.video, Timecode(0), Timecode(0), Path::new(""));
        let stdout = self.run(&argv)?;
        parse_probe_output(&stdout)
    }

    fn extract_audio_clip(
        &self,
        cue_id: u32,
        start: Timecode,
        end: Timecode,
    ) -> Result<AudioClip, MediaError> {
        self.require_video()?;
        let out = self.output_path(cue_id, AUDIO_FILE)?;
        self.run(&self.audio.render(&self.video, start, end, &out))?;
        let bytes = std::fs::read(&out).map_err(|e| MediaError::io(&out, e))?;
        AudioClip::from_wav(cue_id, &bytes)
    }

    fn extract_first_frame(&self, cue_id: u32, at: Timecode) -> Result<Frame, MediaError> {
        self.require_video()?;
        let out = self.output_path(cue_id, FRAME_FILE)?;
        self.run(&self.frame.render(&self.video, at, at, &out))?;
        let bytes = std::fs::read(&out).map_err(|e| MediaError::io(&out, e))?;
        Frame::from_ppm(cue_id, &bytes)
    }

    fn asset_dir(&self) -> Option<PathBuf> {
        Some(self.cache_dir.clone())
    }
}

/// Accepts either a bare `MediaInfo` object or ffprobe's JSON output.
pub(crate) fn parse_probe_output(stdout: &[u8]) -> Result<MediaInfo, MediaError> {
    let value: serde_json::Value = serde_json::from_slice(stdout)
        .map_err(|e| MediaError::Manifest(format!("probe output is not JSON: {e}")))?;
    if value.get("streams").is_none() {
        let info: MediaInfo = serde_json::from_value(value)
            .map_err(|e| MediaError::Manifest(e.to_string()))?;
        return info.validate();
    }
    let bad = |what: &str| MediaError::Manifest(format!("probe output lacks {what}"));
    let video = value["streams"]
        .as_array()
        .and_then(|s| s.iter().find(|s| s["codec_type"] == "video"))
        .ok_or_else(|| bad("a video stream"))?;
    let width = video["width"].as_u64().ok_or_else(|| bad("width"))? as u32;
    let height = video["height"].as_u64().ok_or_else(|| bad("height"))? as u32;
    let fps = video["r_frame_rate"]
        .as_str()
        .and_then(|r| {
            let (n, d) = r.split_once('/')?;
            let (n, d): (f64, f64) = (n.parse().ok()?, d.parse().ok()?);
            (d != 0.0).then(|| n / d)
        })
        .ok_or_else(|| bad("r_frame_rate"))?;
    let duration = value["format"]["duration"]
        .as_str()
        .and_then(|d| d.parse::<f64>().ok())
        .ok_or_else(|| bad("format.duration"))?;
    MediaInfo {
        duration_ms: (duration * 1000.0).round() as u64,
        width,
        height,
        fps,
    }
    .validate()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::media::{ppm, wav};

    #[test]
    fn unknown_placeholder_is_config_error() {
        let err = CommandTemplate::parse("ffmpeg -i {in} {bogus}").unwrap_err();
        assert!(matches!(err, MediaError::Config(_)), "{err}");
        assert!(CommandTemplate::parse("   ").is_err());
        assert!(CommandTemplate::parse("tool {in} --out={out}").is_ok());
    }

    #[test]
    fn render_substitutes_seconds() {
        let t = CommandTemplate::parse("x -ss {start} -to {end} -i {in} {out}").unwrap();
        let argv = t.render(Path::new("/v.mp4"), Timecode(1500), Timecode(62_005), Path::new("/c/a.wav"));
        assert_eq!(argv, ["x", "-ss", "1.500", "-to", "62.005", "-i", "/v.mp4", "/c/a.wav"]);
    }

    #[test]
    fn tool_failure_carries_stderr() {
        let dir = tempfile::tempdir().unwrap();
        let video = dir.path().join("v.mp4");
        std::fs::write(&video, b"").unwrap();
        let commands = MediaCommands {
            audio_cmd: "ls /definitely/not/here/{out}".into(),
            ..MediaCommands::default()
        };
        let media = ExternalMedia::new(&video, dir.path().join("cache"), &commands).unwrap();
        let err = media.extract_audio_clip(1, Timecode(0), Timecode(1000)).unwrap_err();
        match err {
            MediaError::Tool { stderr, .. } => assert!(!stderr.is_empty()),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn external_mode_with_copy_commands() {
        let dir = tempfile::tempdir().unwrap();
        let video = dir.path().join("v.mp4");
        std::fs::write(&video, b"fake").unwrap();
        let wav_src = dir.path().join("src.wav");
        std::fs::write(&wav_src, wav::encode(&vec![0i16; 16_000])).unwrap();
        let ppm_src = dir.path().join("src.ppm");
        std::fs::write(&ppm_src, ppm::encode(4, 2, &[9u8; 24])).unwrap();
        let probe_src = dir.path().join("probe.json");
        std::fs::write(
            &probe_src,
            r#"{"streams":[{"codec_type":"audio"},{"codec_type":"video","width":4,"height":2,"r_frame_rate":"30000/1001"}],"format":{"duration":"12.5"}}"#,
        )
        .unwrap();
        let cache = dir.path().join("cache");
        let commands = MediaCommands {
            audio_cmd: format!("cp {} {{out}}", wav_src.display()),
            frame_cmd: format!("cp {} {{out}}", ppm_src.display()),
            probe_cmd: format!("cat {}", probe_src.display()),
        };
        let media = ExternalMedia::new(&video, &cache, &commands).unwrap();
        let info = media.probe().unwrap();
        assert_eq!((info.width, info.height, info.duration_ms), (4, 2, 12_500));
        assert!((info.fps - 29.97).abs() < 0.01);
        let clip = media.extract_audio_clip(2, Timecode(0), Timecode(1000)).unwrap();
        assert_eq!(clip.samples.len(), 16_000);
        let frame = media.extract_first_frame(2, Timecode(0)).unwrap();
        assert_eq!((frame.width as u32, frame.height as u32), (info.width, info.height));
        // Outputs stay inside the cache directory.
        for entry in walk(&cache) {
            assert!(entry.starts_with(&cache));
        }
        assert!(cache.join("2").join(AUDIO_FILE).exists());
    }

    fn walk(dir: &Path) -> Vec<PathBuf> {
        let mut out = Vec::new();
        for e in std::fs::read_dir(dir).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                out.extend(walk(&p));
            }
            out.push(p);
        }
        out
    }

    #[test]
    fn missing_video() {
        let dir = tempfile::tempdir().unwrap();
        let media =
            ExternalMedia::new(dir.path().join("none.mp4"), dir.path(), &MediaCommands::default()).unwrap();
        assert!(matches!(media.probe(), Err(MediaError::NotFound(_))));
    }
}
