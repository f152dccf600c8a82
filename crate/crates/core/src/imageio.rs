//! Netpbm graymap (PGM) reading and writing, plus a lossless float sidecar.
//!
//! Reading accepts `P2` (ASCII) and `P5` (binary) with `maxval` up to 65535
//! and `#` comments in the header. Intensities are mapped to `[0, 1]` by
//! `value / maxval`. Writing always emits `P5` with the header
//! `"P5\n<w> <h>\n<maxval>\n"`, clamping to `[0, 1]` and rounding half up.
//!
//! The `.f64` sidecar is `height` and `width` as little-endian `u32`,
//! followed by the row-major samples as little-endian `f64`.

use std::path::Path;

use thiserror::Error;

use crate::error::{Error, Result};
use crate::grid::ScalarField;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PgmError {
    #[error("malformed header at byte {offset}: {reason}")]
    MalformedHeader { offset: usize, reason: String },

    #[error("truncated data at byte {offset}: expected {expected} more bytes")]
    TruncatedData { offset: usize, expected: usize },

    #[error("unsupported maxval {maxval} at byte {offset}")]
    UnsupportedMaxval { offset: usize, maxval: u64 },

    #[error("sample {value} exceeds maxval at byte {offset}")]
    SampleOutOfRange { offset: usize, value: u64 },
}

fn malformed(offset: usize, reason: impl Into<String>) -> PgmError {
    PgmError::MalformedHeader {
        offset,
        reason: reason.into(),
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&c) = self.bytes.get(self.pos) {
            if c == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if c.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    /// Next unsigned decimal token; `None` at end of input.
    fn next_uint(&mut self) -> std::result::Result<Option<(u64, usize)>, PgmError> {
        self.skip_space_and_comments();
        let start = self.pos;
        if start >= self.bytes.len() {
            return Ok(None);
        }
        let mut value: u64 = 0;
        while let Some(&c) = self.bytes.get(self.pos) {
            if !c.is_ascii_digit() {
                break;
            }
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add(u64::from(c - b'0')))
                .ok_or_else(|| malformed(start, "integer overflow"))?;
            self.pos += 1;
        }
        if self.pos == start {
            return Err(malformed(start, "expected a decimal integer"));
        }
        Ok(Some((value, start)))
    }

    fn header_uint(&mut self, what: &str) -> std::result::Result<(u64, usize), PgmError> {
        self.next_uint()?
            .ok_or_else(|| malformed(self.pos, format!("missing {what}")))
    }
}

pub fn read_pgm(bytes: &[u8]) -> std::result::Result<ScalarField, PgmError> {
    let binary = match bytes.get(..2) {
        Some(b"P5") => true,
        Some(b"P2") => false,
        _ => return Err(malformed(0, "expected magic P2 or P5")),
    };
    let mut cur = Cursor { bytes, pos: 2 };
    if !cur
        .bytes
        .get(2)
        .is_some_and(|c| c.is_ascii_whitespace() || *c == b'#')
    {
        return Err(malformed(2, "expected whitespace after magic"));
    }

    let (width, w_off) = cur.header_uint("width")?;
    let (height, h_off) = cur.header_uint("height")?;
    let (maxval, m_off) = cur.header_uint("maxval")?;
    if width == 0 {
        return Err(malformed(w_off, "width must be positive"));
    }
    if height == 0 {
        return Err(malformed(h_off, "height must be positive"));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(PgmError::UnsupportedMaxval {
            offset: m_off,
            maxval,
        });
    }
    let (w, h) = (width as usize, height as usize);
    let n = w
        .checked_mul(h)
        .ok_or_else(|| malformed(w_off, "image dimensions overflow"))?;
    let scale = 1.0 / maxval as f64;
    let mut data = Vec::with_capacity(n.min(1 << 24));

    if binary {
        // Exactly one whitespace byte separates the header from the raster.
        match bytes.get(cur.pos) {
            Some(c) if c.is_ascii_whitespace() => cur.pos += 1,
            Some(_) => return Err(malformed(cur.pos, "expected whitespace after maxval")),
            None => {
                return Err(PgmError::TruncatedData {
                    offset: cur.pos,
                    expected: n,
                })
            }
        }
        let sample_bytes = if maxval > 255 { 2 } else { 1 };
        let needed = n * sample_bytes;
        let raster = &bytes[cur.pos..];
        if raster.len() < needed {
            return Err(PgmError::TruncatedData {
                offset: bytes.len(),
                expected: needed - raster.len(),
            });
        }
        for k in 0..n {
            let value = if sample_bytes == 2 {
                u64::from(u16::from_be_bytes([raster[2 * k], raster[2 * k + 1]]))
            } else {
                u64::from(raster[k])
            };
            if value > maxval {
                return Err(PgmError::SampleOutOfRange {
                    offset: cur.pos + k * sample_bytes,
                    value,
                });
            }
            data.push(value as f64 * scale);
        }
    } else {
        for k in 0..n {
            let Some((value, off)) = cur.next_uint()? else {
                return Err(PgmError::TruncatedData {
                    offset: bytes.len(),
                    expected: n - k,
                });
            };
            if value > maxval {
                return Err(PgmError::SampleOutOfRange { offset: off, value });
            }
            data.push(value as f64 * scale);
        }
    }

    Ok(ScalarField::from_vec(h, w, data).expect("dimensions checked above"))
}

/// Quantizes to `round_half_up(clamp(x, 0, 1) * maxval)`.
pub fn quantize(value: f64, maxval: u16) -> u16 {
    let clamped = if value.is_nan() {
        0.0
    } else {
        value.clamp(0.0, 1.0)
    };
    (clamped * f64::from(maxval) + 0.5).floor() as u16
}

/// Binary `P5` encoding. `maxval` must be at least 1.
pub fn write_pgm(field: &ScalarField, maxval: u16) -> Vec<u8> {
    assert!(maxval >= 1, "maxval must be at least 1");
    let mut out = format!("P5\n{} {}\n{}\n", field.width(), field.height(), maxval).into_bytes();
    let wide = maxval > 255;
    out.reserve(field.len() * if wide { 2 } else { 1 });
    for &v in field.data() {
        let q = quantize(v, maxval);
        if wide {
            out.extend_from_slice(&q.to_be_bytes());
        } else {
            out.push(q as u8);
        }
    }
    out
}

/// Display mapping for signed texture layers: `clamp(v + 0.5, 0, 1)`.
pub fn visualize_texture(v: &ScalarField) -> ScalarField {
    v.map(|x| (x + 0.5).clamp(0.0, 1.0))
}

pub fn write_f64(field: &ScalarField) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + 8 * field.len());
    out.extend_from_slice(&(field.height() as u32).to_le_bytes());
    out.extend_from_slice(&(field.width() as u32).to_le_bytes());
    for v in field.data() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn read_f64(bytes: &[u8]) -> std::result::Result<ScalarField, PgmError> {
    if bytes.len() < 8 {
        return Err(PgmError::TruncatedData {
            offset: bytes.len(),
            expected: 8 - bytes.len(),
        });
    }
    let h = u32::from_le_bytes(bytes[0..4].try_into().unwrap()) as usize;
    let w = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    if h == 0 || w == 0 {
        return Err(malformed(0, "sidecar dimensions must be positive"));
    }
    let needed = h * w * 8;
    let payload = &bytes[8..];
    if payload.len() < needed {
        return Err(PgmError::TruncatedData {
            offset: bytes.len(),
            expected: needed - payload.len(),
        });
    }
    let data = payload[..needed]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok(ScalarField::from_vec(h, w, data).expect("dimensions checked above"))
}

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source,
    }
}

pub fn load_pgm(path: &Path) -> Result<ScalarField> {
    let bytes = std::fs::read(path).map_err(|e| io_error(path, e))?;
    Ok(read_pgm(&bytes)?)
}

pub fn save_pgm(path: &Path, field: &ScalarField, maxval: u16) -> Result<()> {
    std::fs::write(path, write_pgm(field, maxval)).map_err(|e| io_error(path, e))
}

pub fn load_f64(path: &Path) -> Result<ScalarField> {
    let bytes = std::fs::read(path).map_err(|e| io_error(path, e))?;
    Ok(read_f64(&bytes)?)
}

pub fn save_f64(path: &Path, field: &ScalarField) -> Result<()> {
    std::fs::write(path, write_f64(field)).map_err(|e| io_error(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reads_binary_8bit() {
        let mut bytes = b"P5 2 2 255\n".to_vec();
        bytes.extend_from_slice(&[0, 255, 128, 64]);
        let f = read_pgm(&bytes).unwrap();
        assert_eq!(f.dims(), (2, 2));
        assert_eq!(f.data(), &[0.0, 1.0, 128.0 / 255.0, 64.0 / 255.0]);
    }

    #[test]
    fn ascii_with_comments_matches_binary() {
        let ascii = b"P2\n# a comment\n2 2\n# another\n255\n0 255\n128 64\n";
        let mut binary = b"P5\n2 2\n255\n".to_vec();
        binary.extend_from_slice(&[0, 255, 128, 64]);
        assert_eq!(read_pgm(ascii).unwrap(), read_pgm(&binary).unwrap());
    }

    #[test]
    fn reads_16bit_big_endian() {
        let mut bytes = b"P5\n2 1\n65535\n".to_vec();
        bytes.extend_from_slice(&[0xff, 0xff, 0x80, 0x00]);
        let f = read_pgm(&bytes).unwrap();
        assert_eq!(f.data(), &[1.0, 32768.0 / 65535.0]);
    }

    #[test]
    fn error_offsets() {
        assert_eq!(
            read_pgm(b"P6 1 1 255\n\0"),
            Err(malformed(0, "expected magic P2 or P5"))
        );
        assert!(matches!(
            read_pgm(b"P5 2 x 255\n"),
            Err(PgmError::MalformedHeader { offset: 5, .. })
        ));
        assert_eq!(
            read_pgm(b"P5 1 1 70000\n\0"),
            Err(PgmError::UnsupportedMaxval {
                offset: 7,
                maxval: 70000
            })
        );
        assert_eq!(
            read_pgm(b"P5 2 2 0\n"),
            Err(PgmError::UnsupportedMaxval {
                offset: 7,
                maxval: 0
            })
        );
        assert_eq!(
            read_pgm(b"P5 2 2 255\n\x01\x02"),
            Err(PgmError::TruncatedData {
                offset: 13,
                expected: 2
            })
        );
        assert_eq!(
            read_pgm(b"P2 2 1 255\n7"),
            Err(PgmError::TruncatedData {
                offset: 12,
                expected: 1
            })
        );
        assert_eq!(
            read_pgm(b"P2 1 1 9\n12"),
            Err(PgmError::SampleOutOfRange {
                offset: 9,
                value: 12
            })
        );
    }

    #[test]
    fn writer_header_and_rounding() {
        let bytes = write_pgm(&ScalarField::filled(2, 3, 0.5), 255);
        let header = b"P5\n3 2\n255\n";
        assert_eq!(&bytes[..header.len()], header);
        assert!(bytes[header.len()..].iter().all(|&b| b == 128));

        let one = write_pgm(&ScalarField::filled(1, 1, 1.0), 255);
        assert_eq!(*one.last().unwrap(), 255);

        let clamped = write_pgm(&ScalarField::from_vec(1, 2, vec![-3.0, 7.0]).unwrap(), 255);
        assert_eq!(&clamped[clamped.len() - 2..], &[0, 255]);
    }

    #[test]
    fn texture_visualization() {
        let map = |x: f64| visualize_texture(&ScalarField::filled(2, 2, x)).data()[0];
        assert_eq!(map(0.0), 0.5);
        assert_eq!(map(-0.5), 0.0);
        assert_eq!(map(0.25), 0.75);
        assert_eq!(map(3.0), 1.0);
    }

    #[test]
    fn sidecar_rejects_truncation() {
        let bytes = write_f64(&ScalarField::filled(2, 2, 1.0));
        assert!(matches!(
            read_f64(&bytes[..bytes.len() - 1]),
            Err(PgmError::TruncatedData { expected: 1, .. })
        ));
        assert!(read_f64(&bytes[..5]).is_err());
    }

    proptest! {
        #[test]
        fn pgm_round_trip_8bit(
            (h, w, pixels) in (1usize..20, 1usize..20)
                .prop_flat_map(|(h, w)| (Just(h), Just(w), prop::collection::vec(any::<u8>(), h * w)))
        ) {
            let mut bytes = format!("P5\n{w} {h}\n255\n").into_bytes();
            bytes.extend_from_slice(&pixels);
            let field = read_pgm(&bytes).unwrap();
            prop_assert_eq!(write_pgm(&field, 255), bytes);
        }

        #[test]
        fn pgm_round_trip_16bit(
            pixels in prop::collection::vec(any::<u16>(), 12)
        ) {
            let mut bytes = b"P5\n4 3\n65535\n".to_vec();
            for p in &pixels {
                bytes.extend_from_slice(&p.to_be_bytes());
            }
            let field = read_pgm(&bytes).unwrap();
            prop_assert_eq!(write_pgm(&field, 65535), bytes);
        }

        #[test]
        fn sidecar_round_trip(data in prop::collection::vec(-1e6f64..1e6, 15)) {
            let field = ScalarField::from_vec(3, 5, data).unwrap();
            prop_assert_eq!(read_f64(&write_f64(&field)).unwrap(), field);
        }
    }
}
