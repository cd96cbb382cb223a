//! Netpbm PGM (P2/P5) and PPM (P3/P6) reading and writing.
//!
//! Only `maxval = 255` is accepted. A larger maxval means 16-bit samples and
//! is rejected as [`Error::UnsupportedDepth`] instead of being truncated.

use std::io::Write;

use super::{ColorImage, DecodedImage, GrayImage};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    GrayAscii,
    ColorAscii,
    GrayBinary,
    ColorBinary,
}

impl Kind {
    fn channels(self) -> usize {
        match self {
            Kind::GrayAscii | Kind::GrayBinary => 1,
            Kind::ColorAscii | Kind::ColorBinary => 3,
        }
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    /// Skip whitespace and `#` comments (which run to end of line).
    fn skip_separators(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn read_uint(&mut self, what: &str) -> Result<u32> {
        self.skip_separators();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(if self.pos >= self.bytes.len() {
                Error::MalformedFile(format!("truncated while reading {what}"))
            } else {
                Error::MalformedFile(format!("expected a number for {what}"))
            });
        }
        // digits only, so utf8 is guaranteed
        std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| Error::MalformedFile(format!("{what} out of range")))
    }
}

pub fn decode_pnm(bytes: &[u8]) -> Result<DecodedImage> {
    let kind = match bytes.get(..2) {
        Some(b"P2") => Kind::GrayAscii,
        Some(b"P3") => Kind::ColorAscii,
        Some(b"P5") => Kind::GrayBinary,
        Some(b"P6") => Kind::ColorBinary,
        _ => return Err(Error::MalformedFile("bad netpbm magic".into())),
    };
    let mut cur = Cursor { bytes, pos: 2 };
    if !cur
        .bytes
        .get(2)
        .is_some_and(|b| b.is_ascii_whitespace() || *b == b'#')
    {
        return Err(Error::MalformedFile("bad netpbm magic".into()));
    }
    let width = cur.read_uint("width")? as usize;
    let height = cur.read_uint("height")? as usize;
    let maxval = cur.read_uint("maxval")?;
    if width == 0 || height == 0 {
        return Err(Error::MalformedFile(format!(
            "zero dimension {width}x{height}"
        )));
    }
    if maxval > 255 {
        return Err(Error::UnsupportedDepth(format!(
            "maxval {maxval} implies 16-bit samples"
        )));
    }
    if maxval != 255 {
        return Err(Error::MalformedFile(format!(
            "maxval must be 255, got {maxval}"
        )));
    }
    let count = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(kind.channels()))
        .ok_or_else(|| Error::MalformedFile("dimensions overflow".into()))?;

    let samples: Vec<u8> = match kind {
        Kind::GrayBinary | Kind::ColorBinary => {
            // exactly one whitespace byte separates the header from the raster
            match bytes.get(cur.pos) {
                Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
                _ => return Err(Error::MalformedFile("missing raster separator".into())),
            }
            let payload = &bytes[cur.pos..];
            if payload.len() < count {
                return Err(Error::MalformedFile(format!(
                    "truncated raster: need {count} bytes, have {}",
                    payload.len()
                )));
            }
            payload[..count].to_vec()
        }
        Kind::GrayAscii | Kind::ColorAscii => {
            let mut out = Vec::with_capacity(count);
            for _ in 0..count {
                let v = cur.read_uint("sample")?;
                if v > maxval {
                    return Err(Error::MalformedFile(format!("sample {v} exceeds maxval")));
                }
                out.push(v as u8);
            }
            out
        }
    };

    if kind.channels() == 1 {
        Ok(DecodedImage::Gray(GrayImage::new(width, height, samples)?))
    } else {
        let px = samples
            .chunks_exact(3)
            .map(|c| [c[0], c[1], c[2]])
            .collect();
        Ok(DecodedImage::Color(ColorImage::new(width, height, px)?))
    }
}

/// Binary (P5) PGM.
pub fn encode_pgm(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.pixels());
    out
}

/// Plain-text (P2) PGM, one raster row per line.
pub fn encode_pgm_ascii(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P2\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    for row in img.pixels().chunks(img.width().max(1)) {
        let line: Vec<String> = row.iter().map(u8::to_string).collect();
        writeln!(out, "{}", line.join(" ")).unwrap();
    }
    out
}

/// Binary (P6) PPM.
pub fn encode_ppm(img: &ColorImage) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    for px in img.pixels() {
        out.extend_from_slice(px);
    }
    out
}

/// Plain-text (P3) PPM.
pub fn encode_ppm_ascii(img: &ColorImage) -> Vec<u8> {
    let mut out = format!("P3\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    for row in img.pixels().chunks(img.width()) {
        let line: Vec<String> = row.iter().map(|[r, g, b]| format!("{r} {g} {b}")).collect();
        writeln!(out, "{}", line.join(" ")).unwrap();
    }
    out
}
