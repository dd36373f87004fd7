//! Binary P6 portable pixmap codec (maxval 255 only).

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PpmError {
    #[error("not a binary P6 pixmap")]
    BadMagic,
    #[error("malformed header")]
    Header,
    #[error("unsupported maxval {0} (255 required)")]
    MaxVal(u32),
    #[error("pixel data truncated: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
}

/// Decodes into `(width, height, rgb)`.
pub fn decode(bytes: &[u8]) -> Result<(usize, usize, Vec<u8>), PpmError> {
    if bytes.len() < 2 || &bytes[..2] != b"P6" {
        return Err(PpmError::BadMagic);
    }
    let mut pos = 2;
    let mut fields = [0u32; 3];
    for field in fields.iter_mut() {
        // Whitespace and comments may separate header fields.
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                _ => break,
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or(PpmError::Header)?;
    }
    if !bytes.get(pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(PpmError::Header);
    }
    pos += 1;
    let [width, height, maxval] = fields;
    if maxval != 255 {
        return Err(PpmError::MaxVal(maxval));
    }
    if width == 0 || height == 0 {
        return Err(PpmError::Header);
    }
    let expected = width as usize * height as usize * 3;
    let data = &bytes[pos..];
    if data.len() < expected {
        return Err(PpmError::Truncated {
            expected,
            found: data.len(),
        });
    }
    Ok((width as usize, height as usize, data[..expected].to_vec()))
}

pub fn encode(width: usize, height: usize, rgb: &[u8]) -> Vec<u8> {
    let mut out = format!("P6\n{width} {height}\n255\n").into_bytes();
    out.extend_from_slice(rgb);
    out
}
