use std::path::{Path, PathBuf};

use super::{
    AudioClip, Frame, MediaError, MediaInfo, MediaSource, AUDIO_FILE, FRAME_FILE, MANIFEST_FILE,
};
use crate::subtitle::Timecode;

/// Reads pre-extracted assets laid out as `<root>/<cue_id>/{audio.wav,frame.ppm}`
/// with a `media.json` manifest at the root.
#[derive(Debug, Clone)]
pub struct OfflineAssets {
    root: PathBuf,
}

impl OfflineAssets {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        OfflineAssets { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn cue_dir(&self, cue_id: u32) -> PathBuf {
        self.root.join(cue_id.to_string())
    }

    fn read(&self, cue_id: u32, name: &str) -> Result<Vec<u8>, MediaError> {
        let path = self.cue_dir(cue_id).join(name);
        std::fs::read(&path).map_err(|e| MediaError::io(path, e))
    }
}

impl MediaSource for OfflineAssets {
    fn probe(&self) -> Result<MediaInfo, MediaError> {
        let path = self.root.join(MANIFEST_FILE);
        let bytes = std::fs::read(&path).map_err(|_| MediaError::NotFound(path.clone()))?;
        let info: MediaInfo = serde_json::from_slice(&bytes)
            .map_err(|e| MediaError::Manifest(format!("{}: {e}", path.display())))?;
        info.validate()
    }

    fn extract_audio_clip(
        &self,
        cue_id: u32,
        _start: Timecode,
        _end: Timecode,
    ) -> Result<AudioClip, MediaError> {
        AudioClip::from_wav(cue_id, &self.read(cue_id, AUDIO_FILE)?)
    }

    fn extract_first_frame(&self, cue_id: u32, _at: Timecode) -> Result<Frame, MediaError> {
        Frame::from_ppm(cue_id, &self.read(cue_id, FRAME_FILE)?)
    }

    fn asset_dir(&self) -> Option<PathBuf> {
        Some(self.root.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::media::wav;

    #[test]
    fn manifest_echo_and_assets() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(
            dir.path().join(MANIFEST_FILE),
            r#"{"duration_ms":180000,"width":1920,"height":1080,"fps":25.0}"#,
        )
        .unwrap();
        let assets = OfflineAssets::new(dir.path());
        assert_eq!(
            assets.probe().unwrap(),
            MediaInfo { duration_ms: 180_000, width: 1920, height: 1080, fps: 25.0 }
        );

        std::fs::create_dir(dir.path().join("3")).unwrap();
        let samples: Vec<i16> = (0..16_000).map(|i| (i % 100) as i16).collect();
        std::fs::write(dir.path().join("3").join(AUDIO_FILE), wav::encode(&samples)).unwrap();
        let clip = assets.extract_audio_clip(3, Timecode(0), Timecode(1000)).unwrap();
        assert_eq!(clip.samples, samples);
        assert_eq!(clip.duration_ms(), 1000);

        let err = assets.extract_first_frame(3, Timecode(0)).unwrap_err();
        assert!(matches!(err, MediaError::AssetMissing(_)), "{err}");
    }

    #[test]
    fn missing_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let err = OfflineAssets::new(dir.path().join("nope")).probe().unwrap_err();
        assert!(matches!(err, MediaError::NotFound(_)));
    }
}
