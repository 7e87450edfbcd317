//! Portable graymap (PGM) reading and writing, ASCII (P2) and binary (P5).

use super::GreyImage;
use crate::error::{Error, Result};
use crate::lip::LipScale;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PgmVariant {
    /// ASCII samples.
    P2,
    /// Binary samples, one byte each for maxval < 256, otherwise two bytes big-endian.
    P5,
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.data.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.data.get(self.pos) {
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<u32> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.data.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(match self.data.get(start) {
                None => Error::parse(start, format!("unexpected end of data, expected {what}")),
                Some(&b) => Error::parse(start, format!("expected {what}, found byte 0x{b:02x}")),
            });
        }
        std::str::from_utf8(&self.data[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::parse(start, format!("{what} out of range")))
    }
}

/// Decodes a P2 or P5 stream. The scale is `M = maxval + 1`.
pub fn read_pgm(bytes: &[u8]) -> Result<GreyImage> {
    let variant = match bytes.get(..2) {
        Some(b"P2") => PgmVariant::P2,
        Some(b"P5") => PgmVariant::P5,
        _ => return Err(Error::parse(0, "not a PGM stream (expected magic P2 or P5)")),
    };
    let mut cur = Cursor { data: bytes, pos: 2 };

    let width_at = cur.pos;
    let width = cur.number("width")? as usize;
    let height = cur.number("height")? as usize;
    if width == 0 || height == 0 {
        return Err(Error::parse(width_at, format!("empty image {width}x{height}")));
    }
    let maxval_at = cur.pos;
    let maxval = cur.number("maxval")?;
    if !(1..=65535).contains(&maxval) {
        return Err(Error::parse(maxval_at, format!("maxval {maxval} not in 1..=65535")));
    }
    let count = width
        .checked_mul(height)
        .ok_or_else(|| Error::parse(width_at, "image dimensions overflow"))?;

    let mut pixels = Vec::with_capacity(count.min(1 << 24));
    match variant {
        PgmVariant::P2 => {
            for _ in 0..count {
                cur.skip_space_and_comments();
                let at = cur.pos;
                let v = cur.number("sample")?;
                if v > maxval {
                    return Err(Error::parse(at, format!("sample {v} exceeds maxval {maxval}")));
                }
                pixels.push(f64::from(v));
            }
        }
        PgmVariant::P5 => {
            // exactly one whitespace byte separates the header from the raster
            match bytes.get(cur.pos) {
                Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
                _ => return Err(Error::parse(cur.pos, "missing whitespace after maxval")),
            }
            let sample_bytes = if maxval < 256 { 1 } else { 2 };
            let need = count * sample_bytes;
            let raster = &bytes[cur.pos..];
            if raster.len() < need {
                return Err(Error::parse(
                    bytes.len(),
                    format!("truncated raster: expected {need} bytes, got {}", raster.len()),
                ));
            }
            for (i, chunk) in raster[..need].chunks_exact(sample_bytes).enumerate() {
                let v = match *chunk {
                    [b] => u32::from(b),
                    [hi, lo] => u32::from(u16::from_be_bytes([hi, lo])),
                    _ => unreachable!(),
                };
                if v > maxval {
                    return Err(Error::parse(
                        cur.pos + i * sample_bytes,
                        format!("sample {v} exceeds maxval {maxval}"),
                    ));
                }
                pixels.push(f64::from(v));
            }
        }
    }

    GreyImage::new(width, height, LipScale::from_maxval(maxval)?, pixels)
}

fn maxval_of(image: &GreyImage) -> Result<u32> {
    let maxval = image.scale().m() - 1.0;
    if maxval.fract() != 0.0 || !(1.0..=65535.0).contains(&maxval) {
        return Err(Error::Encode(format!(
            "grey-scale bound {} does not correspond to an integer maxval in 1..=65535",
            image.scale().m()
        )));
    }
    Ok(maxval as u32)
}

/// Encodes an image, rounding each pixel to the nearest integer.
/// Fails if a rounded pixel falls outside `[0, maxval]` where `maxval = M − 1`.
pub fn write_pgm(image: &GreyImage, variant: PgmVariant) -> Result<Vec<u8>> {
    let maxval = maxval_of(image)?;
    let samples = image
        .pixels()
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let r = v.round();
            if r.is_finite() && (0.0..=f64::from(maxval)).contains(&r) {
                Ok(r as u16)
            } else {
                Err(Error::Encode(format!(
                    "pixel ({}, {}) = {v} not representable with maxval {maxval}",
                    i % image.width(),
                    i / image.width()
                )))
            }
        })
        .collect::<Result<Vec<u16>>>()?;

    let magic = match variant {
        PgmVariant::P2 => "P2",
        PgmVariant::P5 => "P5",
    };
    let mut out = format!("{magic}\n{} {}\n{maxval}\n", image.width(), image.height()).into_bytes();
    match variant {
        PgmVariant::P2 => {
            for row in samples.chunks(image.width()) {
                let line: Vec<String> = row.iter().map(u16::to_string).collect();
                out.extend_from_slice(line.join(" ").as_bytes());
                out.push(b'\n');
            }
        }
        PgmVariant::P5 => {
            for s in samples {
                if maxval < 256 {
                    out.push(s as u8);
                } else {
                    out.extend_from_slice(&s.to_be_bytes());
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_p2() {
        let img = read_pgm(b"P2\n2 1\n255\n10 20\n").unwrap();
        assert_eq!((img.width(), img.height()), (2, 1));
        assert_eq!(img.scale().m(), 256.0);
        assert_eq!(img.pixels(), &[10.0, 20.0]);
    }

    #[test]
    fn reads_p5() {
        let img = read_pgm(b"P5\n2 1\n255\n\x0a\x14").unwrap();
        assert_eq!(img.pixels(), &[10.0, 20.0]);
    }

    #[test]
    fn reads_p5_sixteen_bit_big_endian() {
        let img = read_pgm(b"P5 2 1 65535\n\x01\x00\xff\xfe").unwrap();
        assert_eq!(img.scale().m(), 65536.0);
        assert_eq!(img.pixels(), &[256.0, 65534.0]);
    }

    #[test]
    fn skips_comments() {
        let img = read_pgm(b"P2\n# made by hand\n2 # width\n1\n255\n10 # first\n20\n").unwrap();
        assert_eq!(img.pixels(), &[10.0, 20.0]);
    }

    #[test]
    fn truncated_payload() {
        let err = read_pgm(b"P5\n2 2\n255\n\x01\x02\x03").unwrap_err();
        match err {
            Error::Parse { message, .. } => assert!(message.contains("expected 4 bytes, got 3"), "{message}"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(read_pgm(b"P2\n2 2\n255\n1 2 3"), Err(Error::Parse { .. })));
    }

    #[test]
    fn header_errors() {
        assert!(matches!(
            read_pgm(b"P6\n1 1\n255\n\0"),
            Err(Error::Parse { offset: 0, .. })
        ));
        assert!(matches!(read_pgm(b"P2\n1 1\n0\n0"), Err(Error::Parse { .. })));
        assert!(matches!(read_pgm(b"P2\n1 1\n70000\n0"), Err(Error::Parse { .. })));
        assert!(matches!(read_pgm(b"P2\n0 1\n255\n"), Err(Error::Parse { .. })));
        assert!(matches!(
            read_pgm(b"P2\nx 1\n255\n"),
            Err(Error::Parse { offset: 3, .. })
        ));
    }

    #[test]
    fn sample_above_maxval() {
        let err = read_pgm(b"P2\n2 1\n100\n10 200\n").unwrap_err();
        assert!(matches!(err, Error::Parse { offset: 14, .. }), "{err:?}");
        assert!(read_pgm(b"P5\n1 1\n100\n\xc8").is_err());
    }

    #[test]
    fn writes_p2_canonically() {
        let img = read_pgm(b"P2\n2 1\n255\n10   20").unwrap();
        assert_eq!(write_pgm(&img, PgmVariant::P2).unwrap(), b"P2\n2 1\n255\n10 20\n");
    }

    #[test]
    fn rejects_unrepresentable_pixel() {
        let img = GreyImage::new(1, 1, LipScale::eight_bit(), vec![300.0]).unwrap();
        assert!(matches!(write_pgm(&img, PgmVariant::P5), Err(Error::Encode(_))));
        let odd = GreyImage::new(1, 1, LipScale::new(100.5).unwrap(), vec![3.0]).unwrap();
        assert!(matches!(write_pgm(&odd, PgmVariant::P2), Err(Error::Encode(_))));
    }

    #[test]
    fn single_black_pixel() {
        let img = GreyImage::new(1, 1, LipScale::eight_bit(), vec![0.0]).unwrap();
        for variant in [PgmVariant::P2, PgmVariant::P5] {
            let bytes = write_pgm(&img, variant).unwrap();
            assert_eq!(read_pgm(&bytes).unwrap(), img);
        }
    }
}
