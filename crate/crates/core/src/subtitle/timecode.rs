use std::fmt;

use serde::{Deserialize, Serialize};

/// Milliseconds since the start of the video.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Timecode(pub u64);

impl Timecode {
    pub const fn from_ms(ms: u64) -> Self {
        Timecode(ms)
    }

    pub const fn ms(self) -> u64 {
        self.0
    }

    fn parts(self) -> (u64, u64, u64, u64) {
        let ms = self.0 % 1000;
        let total_secs = self.0 / 1000;
        (total_secs / 3600, (total_secs / 60) % 60, total_secs % 60, ms)
    }

    /// `HH:MM:SS,mmm`
    pub fn to_srt(self) -> String {
        let (h, m, s, ms) = self.parts();
        format!("{h:02}:{m:02}:{s:02},{ms:03}")
    }

    /// `HH:MM:SS.mmm`
    pub fn to_vtt(self) -> String {
        let (h, m, s, ms) = self.parts();
        format!("{h:02}:{m:02}:{s:02}.{ms:03}")
    }

    /// Seconds with millisecond precision, as external media tools expect.
    pub fn to_seconds_string(self) -> String {
        format!("{}.{:03}", self.0 / 1000, self.0 % 1000)
    }

    /// Parses `H+:MM:SS,mmm`.
    pub fn parse_srt(s: &str) -> Option<Self> {
        let (hms, ms) = s.split_once(',')?;
        let mut it = hms.split(':');
        let (h, m, sec) = (it.next()?, it.next()?, it.next()?);
        if it.next().is_some() {
            return None;
        }
        Self::assemble(Some(h), m, sec, ms)
    }

    /// Parses `[HH+:]MM:SS.mmm`.
    pub fn parse_vtt(s: &str) -> Option<Self> {
        let (hms, ms) = s.split_once('.')?;
        let fields: Vec<&str> = hms.split(':').collect();
        match fields.as_slice() {
            [m, sec] => Self::assemble(None, m, sec, ms),
            [h, m, sec] if h.len() >= 2 => Self::assemble(Some(h), m, sec, ms),
            _ => None,
        }
    }

    fn assemble(h: Option<&str>, m: &str, s: &str, ms: &str) -> Option<Self> {
        fn digits(v: &str, len: Option<usize>) -> Option<u64> {
            if v.is_empty() || !v.bytes().all(|b| b.is_ascii_digit()) {
                return None;
            }
            if len.is_some_and(|n| v.len() != n) {
                return None;
            }
            v.parse().ok()
        }
        let hours = match h {
            Some(h) => digits(h, None)?,
            None => 0,
        };
        let minutes = digits(m, Some(2))?;
        let seconds = digits(s, Some(2))?;
        let millis = digits(ms, Some(3))?;
        if minutes > 59 || seconds > 59 {
            return None;
        }
        let total = hours
            .checked_mul(3_600_000)?
            .checked_add(minutes * 60_000 + seconds * 1000 + millis)?;
        Some(Timecode(total))
    }
}

impl fmt::Display for Timecode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_vtt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn formats_zero_padded() {
        assert_eq!(Timecode(1000).to_srt(), "00:00:01,000");
        assert_eq!(Timecode(3_723_004).to_vtt(), "01:02:03.004");
    }

    #[test]
    fn vtt_short_form_and_long_hours() {
        assert_eq!(Timecode::parse_vtt("01:02.500"), Some(Timecode(62_500)));
        assert_eq!(Timecode::parse_vtt("123:00:00.000"), Some(Timecode(442_800_000)));
        assert_eq!(Timecode::parse_vtt("00:00:01,000"), None);
        assert_eq!(Timecode::parse_vtt("1:00:01.000"), None);
    }

    #[test]
    fn rejects_malformed() {
        for bad in ["00:00:01.000", "00:60:00,000", "00:00:1,000", "00:00:01,00", "aa:00:01,000", ""] {
            assert_eq!(Timecode::parse_srt(bad), None, "{bad}");
        }
    }

    proptest! {
        #[test]
        fn srt_bijection(ms in 0u64..360_000_000) {
            let tc = Timecode(ms);
            prop_assert_eq!(Timecode::parse_srt(&tc.to_srt()), Some(tc));
            prop_assert_eq!(Timecode::parse_vtt(&tc.to_vtt()), Some(tc));
        }
    }
}
