//! Minimal RIFF/WAVE codec restricted to the canonical clip format.

use thiserror::Error;

pub const CANONICAL_RATE: u32 = 16_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WavError {
    #[error("not a RIFF/WAVE file")]
    NotRiff,
    #[error("unsupported audio format tag {0} (PCM required)")]
    NotPcm(u16),
    #[error("expected mono audio, found {0} channels")]
    Channels(u16),
    #[error("expected 16000 Hz, found {0} Hz")]
    SampleRate(u32),
    #[error("expected 16-bit samples, found {0}-bit")]
    BitsPerSample(u16),
    #[error("missing {0} chunk")]
    MissingChunk(&'static str),
    #[error("truncated file")]
    Truncated,
}

fn u16_at(b: &[u8], at: usize) -> Result<u16, WavError> {
    b.get(at..at + 2)
        .map(|s| u16::from_le_bytes([s[0], s[1]]))
        .ok_or(WavError::Truncated)
}

fn u32_at(b: &[u8], at: usize) -> Result<u32, WavError> {
    b.get(at..at + 4)
        .map(|s| u32::from_le_bytes([s[0], s[1], s[2], s[3]]))
        .ok_or(WavError::Truncated)
}

/// Decodes a PCM-16 mono 16 kHz WAV file into samples.
pub fn decode(bytes: &[u8]) -> Result<Vec<i16>, WavError> {
    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(WavError::NotRiff);
    }
    let mut pos = 12;
    let mut fmt_seen = false;
    while pos + 8 <= bytes.len() {
        let id = &bytes[pos..pos + 4];
        let size = u32_at(bytes, pos + 4)? as usize;
        let body = pos + 8;
        match id {
            b"fmt " => {
                let format = u16_at(bytes, body)?;
                let channels = u16_at(bytes, body + 2)?;
                let rate = u32_at(bytes, body + 4)?;
                let bits = u16_at(bytes, body + 14)?;
                if format != 1 {
                    return Err(WavError::NotPcm(format));
                }
                if channels != 1 {
                    return Err(WavError::Channels(channels));
                }
                if rate != CANONICAL_RATE {
                    return Err(WavError::SampleRate(rate));
                }
                if bits != 16 {
                    return Err(WavError::BitsPerSample(bits));
                }
                fmt_seen = true;
            }
            b"data" => {
                if !fmt_seen {
                    return Err(WavError::MissingChunk("fmt"));
                }
                // Streaming writers may leave the size field at its maximum.
                let end = body.saturating_add(size).min(bytes.len());
                let data = &bytes[body..end];
                return Ok(data
                    .chunks_exact(2)
                    .map(|c| i16::from_le_bytes([c[0], c[1]]))
                    .collect());
            }
            _ => {}
        }
        pos = body.saturating_add(size + (size & 1));
    }
    Err(WavError::MissingChunk(if fmt_seen { "data" } else { "fmt" }))
}

/// Encodes samples as a canonical 44-byte-header WAV file.
pub fn encode(samples: &[i16]) -> Vec<u8> {
    let data_len = (samples.len() * 2) as u32;
    let mut out = Vec::with_capacity(44 + data_len as usize);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(36 + data_len).to_le_bytes());
    out.extend_from_slice(b"WAVEfmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&CANONICAL_RATE.to_le_bytes());
    out.extend_from_slice(&(CANONICAL_RATE * 2).to_le_bytes());
    out.extend_from_slice(&2u16.to_le_bytes());
    out.extend_from_slice(&16u16.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&data_len.to_le_bytes());
    for s in samples {
        out.extend_from_slice(&s.to_le_bytes());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn with_fmt(format: u16, channels: u16, rate: u32, bits: u16) -> Vec<u8> {
        let mut b = encode(&[1, 2, 3]);
        b[20..22].copy_from_slice(&format.to_le_bytes());
        b[22..24].copy_from_slice(&channels.to_le_bytes());
        b[24..28].copy_from_slice(&rate.to_le_bytes());
        b[34..36].copy_from_slice(&bits.to_le_bytes());
        b
    }

    #[test]
    fn rejects_non_canonical() {
        assert_eq!(decode(&with_fmt(3, 1, 16_000, 16)), Err(WavError::NotPcm(3)));
        assert_eq!(decode(&with_fmt(1, 2, 16_000, 16)), Err(WavError::Channels(2)));
        assert_eq!(decode(&with_fmt(1, 1, 44_100, 16)), Err(WavError::SampleRate(44_100)));
        assert_eq!(decode(&with_fmt(1, 1, 16_000, 8)), Err(WavError::BitsPerSample(8)));
        assert_eq!(decode(b"RIFX0000WAVE"), Err(WavError::NotRiff));
        assert_eq!(decode(&encode(&[])[..36]), Err(WavError::MissingChunk("data")));
    }

    #[test]
    fn skips_unknown_chunks() {
        let plain = encode(&[7, -7]);
        let mut with_list = plain[..36].to_vec();
        with_list.extend_from_slice(b"LIST");
        with_list.extend_from_slice(&3u32.to_le_bytes());
        with_list.extend_from_slice(&[0, 0, 0, 0]);
        with_list.extend_from_slice(&plain[36..]);
        assert_eq!(decode(&with_list).unwrap(), vec![7, -7]);
    }

    proptest! {
        #[test]
        fn codec_round_trip(samples in proptest::collection::vec(any::<i16>(), 0..512)) {
            prop_assert_eq!(decode(&encode(&samples)).unwrap(), samples);
        }
    }
}
