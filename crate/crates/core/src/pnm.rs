//! PBM input, 16-bit PGM label output and the text table dump.
//!
//! In PBM a set bit is black, which is read as foreground.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use thiserror::Error;

use crate::{BinaryImage, EquivalenceTable, Label, LabelImage};

/// Largest accepted pixel count.
const MAX_PIXELS: usize = 1 << 30;

#[derive(Debug, Error)]
pub enum PnmError {
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
    #[error("malformed header: {0}")]
    Header(String),
    #[error("image of {width}x{height} is too large")]
    Overflow { width: usize, height: usize },
    #[error("pixel data: {0}")]
    Data(String),
    #[error("label {label} does not fit a 16-bit sample")]
    LabelRange { label: Label },
}

pub type PnmResult<T> = Result<T, PnmError>;

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_space(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while self.bytes.get(self.pos).is_some_and(|&c| c != b'\n') {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> PnmResult<usize> {
        self.skip_space();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| PnmError::Header(format!("expected {what}")))
    }

    fn magic(&mut self) -> PnmResult<&'a [u8]> {
        let m = self
            .bytes
            .get(..2)
            .ok_or_else(|| PnmError::Header("file too short".into()))?;
        self.pos = 2;
        Ok(m)
    }

    /// The single whitespace byte between header and raster.
    fn raster(&mut self) -> PnmResult<&'a [u8]> {
        match self.bytes.get(self.pos) {
            Some(b) if b.is_ascii_whitespace() => Ok(&self.bytes[self.pos + 1..]),
            _ => Err(PnmError::Header("missing separator before raster".into())),
        }
    }
}

fn dimensions(c: &mut Cursor) -> PnmResult<(usize, usize)> {
    let width = c.number("width")?;
    let height = c.number("height")?;
    match width.checked_mul(height) {
        Some(n) if n <= MAX_PIXELS => Ok((width, height)),
        _ => Err(PnmError::Overflow { width, height }),
    }
}

/// Parses plain (P1) or raw (P4) PBM.
pub fn parse_pbm(bytes: &[u8]) -> PnmResult<BinaryImage> {
    let mut c = Cursor { bytes, pos: 0 };
    let magic = c.magic()?;
    let (width, height) = dimensions(&mut c)?;
    let mut data = Vec::with_capacity(width * height);
    match magic {
        b"P1" => {
            while data.len() < width * height {
                c.skip_space();
                match c.bytes.get(c.pos) {
                    Some(b'0') => data.push(0),
                    Some(b'1') => data.push(1),
                    Some(&b) => return Err(PnmError::Data(format!("unexpected byte {b:#04x}"))),
                    None => return Err(PnmError::Data("raster ends early".into())),
                }
                c.pos += 1;
            }
        }
        b"P4" => {
            let raster = c.raster()?;
            let stride = width.div_ceil(8);
            if raster.len() < stride * height {
                return Err(PnmError::Data("raster ends early".into()));
            }
            for row in raster.chunks_exact(stride.max(1)).take(height) {
                data.extend((0..width).map(|x| (row[x / 8] >> (7 - x % 8)) & 1));
            }
        }
        _ => return Err(PnmError::Header("not a PBM file".into())),
    }
    BinaryImage::new(width, height, data).map_err(|e| PnmError::Data(e.to_string()))
}

pub fn read_pbm(path: impl AsRef<Path>) -> PnmResult<BinaryImage> {
    parse_pbm(&fs::read(path)?)
}

/// Raw (P4) encoding.
pub fn encode_pbm(img: &BinaryImage) -> Vec<u8> {
    let mut out = format!("P4\n{} {}\n", img.width(), img.height()).into_bytes();
    let stride = img.width().div_ceil(8);
    for y in 0..img.height() {
        let mut row = vec![0u8; stride];
        for x in 0..img.width() {
            if img.get(x, y) {
                row[x / 8] |= 0x80 >> (x % 8);
            }
        }
        out.extend_from_slice(&row);
    }
    out
}

pub fn write_pbm(path: impl AsRef<Path>, img: &BinaryImage) -> PnmResult<()> {
    Ok(fs::write(path, encode_pbm(img))?)
}

/// P5 with maxval 65535, big-endian samples.
pub fn encode_pgm16(img: &LabelImage) -> PnmResult<Vec<u8>> {
    let mut out = format!("P5\n{} {}\n65535\n", img.width(), img.height()).into_bytes();
    out.reserve(img.data().len() * 2);
    for &label in img.data() {
        let sample = u16::try_from(label).map_err(|_| PnmError::LabelRange { label })?;
        out.extend_from_slice(&sample.to_be_bytes());
    }
    Ok(out)
}

pub fn write_pgm16(path: impl AsRef<Path>, img: &LabelImage) -> PnmResult<()> {
    Ok(fs::write(path, encode_pgm16(img)?)?)
}

pub fn parse_pgm16(bytes: &[u8]) -> PnmResult<LabelImage> {
    let mut c = Cursor { bytes, pos: 0 };
    if c.magic()? != b"P5" {
        return Err(PnmError::Header("not a raw PGM file".into()));
    }
    let (width, height) = dimensions(&mut c)?;
    let maxval = c.number("maxval")?;
    if !(256..=65535).contains(&maxval) {
        return Err(PnmError::Header(format!("maxval {maxval} is not 16-bit")));
    }
    let raster = c.raster()?;
    if raster.len() < width * height * 2 {
        return Err(PnmError::Data("raster ends early".into()));
    }
    let data = raster
        .chunks_exact(2)
        .take(width * height)
        .map(|s| Label::from(u16::from_be_bytes([s[0], s[1]])))
        .collect();
    LabelImage::new(width, height, data).map_err(|e| PnmError::Data(e.to_string()))
}

pub fn read_pgm16(path: impl AsRef<Path>) -> PnmResult<LabelImage> {
    parse_pgm16(&fs::read(path)?)
}

/// One `address data` line per cell, ascending address.
pub fn write_table_dump(mut out: impl Write, t: &EquivalenceTable) -> io::Result<()> {
    for (address, data) in t.entries() {
        writeln!(out, "{address} {data}")?;
    }
    Ok(())
}
