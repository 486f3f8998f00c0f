//! Minimal netpbm reader/writer: binary and ASCII PGM for grayscale covers,
//! PBM for binary logos. PGM logos are accepted with any nonzero pixel
//! reading as bit 1.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::image::{GrayImage, WatermarkBits};

struct TokenReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> TokenReader<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0 }
    }

    fn skip_separators(&mut self) {
        while self.pos < self.bytes.len() {
            let b = self.bytes[self.pos];
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
    }

    fn next_usize(&mut self) -> Result<usize> {
        self.skip_separators();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(Error::Parse("expected integer in netpbm header".into()));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse("invalid integer in netpbm header".into()))
    }

    /// Consume the single whitespace byte that ends a binary-format header.
    fn expect_single_whitespace(&mut self) -> Result<()> {
        if self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::Parse("missing whitespace before raster data".into()))
        }
    }

    fn rest(&self) -> &'a [u8] {
        &self.bytes[self.pos..]
    }
}

fn magic(bytes: &[u8]) -> Result<&[u8]> {
    if bytes.len() < 2 || bytes[0] != b'P' {
        return Err(Error::Parse("not a netpbm file".into()));
    }
    Ok(&bytes[..2])
}

/// Parse a PGM image (P5 binary or P2 ASCII) from memory.
pub fn parse_pgm(bytes: &[u8]) -> Result<GrayImage> {
    let m = magic(bytes)?;
    let binary = match m {
        b"P5" => true,
        b"P2" => false,
        _ => {
            return Err(Error::Parse(format!(
                "expected PGM magic P5/P2, found {}",
                String::from_utf8_lossy(m)
            )))
        }
    };
    let mut r = TokenReader::new(&bytes[2..]);
    let width = r.next_usize()?;
    let height = r.next_usize()?;
    let maxval = r.next_usize()?;
    if maxval == 0 || maxval > 255 {
        return Err(Error::Parse(format!(
            "unsupported PGM maxval {maxval}; only 8-bit images are handled"
        )));
    }
    let n = width
        .checked_mul(height)
        .ok_or_else(|| Error::Parse("image size overflows".into()))?;
    let data = if binary {
        r.expect_single_whitespace()?;
        let raster = r.rest();
        if raster.len() < n {
            return Err(Error::Parse(format!(
                "PGM raster truncated: {} of {} bytes",
                raster.len(),
                n
            )));
        }
        raster[..n].to_vec()
    } else {
        let mut data = Vec::with_capacity(n);
        for _ in 0..n {
            let v = r.next_usize()?;
            if v > maxval {
                return Err(Error::Parse(format!("sample {v} exceeds maxval {maxval}")));
            }
            data.push(v as u8);
        }
        data
    };
    GrayImage::new(width, height, data)
}

/// Parse a binary logo from PBM (P4/P1, bit 1 = bit 1) or PGM (nonzero = bit 1).
pub fn parse_logo(bytes: &[u8]) -> Result<WatermarkBits> {
    match magic(bytes)? {
        b"P1" | b"P4" => parse_pbm(bytes),
        b"P2" | b"P5" => {
            let img = parse_pgm(bytes)?;
            let bits = img.data().iter().map(|&p| u8::from(p != 0)).collect();
            WatermarkBits::new(img.width(), img.height(), bits)
        }
        m => Err(Error::Parse(format!(
            "expected PBM/PGM logo, found magic {}",
            String::from_utf8_lossy(m)
        ))),
    }
}

fn parse_pbm(bytes: &[u8]) -> Result<WatermarkBits> {
    let binary = match magic(bytes)? {
        b"P4" => true,
        b"P1" => false,
        _ => unreachable!("checked by caller"),
    };
    let mut r = TokenReader::new(&bytes[2..]);
    let width = r.next_usize()?;
    let height = r.next_usize()?;
    let mut bits = Vec::with_capacity(width * height);
    if binary {
        r.expect_single_whitespace()?;
        let raster = r.rest();
        let row_bytes = width.div_ceil(8);
        if raster.len() < row_bytes * height {
            return Err(Error::Parse("PBM raster truncated".into()));
        }
        for y in 0..height {
            let row = &raster[y * row_bytes..(y + 1) * row_bytes];
            for x in 0..width {
                bits.push((row[x / 8] >> (7 - x % 8)) & 1);
            }
        }
    } else {
        // P1 digits may be packed without separators
        let raster = r.rest();
        let mut pos = 0;
        while bits.len() < width * height && pos < raster.len() {
            match raster[pos] {
                b'0' => bits.push(0),
                b'1' => bits.push(1),
                b'#' => {
                    while pos < raster.len() && raster[pos] != b'\n' {
                        pos += 1;
                    }
                }
                b if b.is_ascii_whitespace() => {}
                other => {
                    return Err(Error::Parse(format!(
                        "unexpected byte {other:#04x} in P1 raster"
                    )))
                }
            }
            pos += 1;
        }
        if bits.len() < width * height {
            return Err(Error::Parse("P1 raster truncated".into()));
        }
    }
    WatermarkBits::new(width, height, bits)
}

/// Encode as binary PGM (P5).
pub fn pgm_bytes(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.data());
    out
}

/// Encode as binary PBM (P4); logo bit 1 maps to raster bit 1.
pub fn pbm_bytes(wm: &WatermarkBits) -> Vec<u8> {
    let mut out = format!("P4\n{} {}\n", wm.width(), wm.height()).into_bytes();
    let row_bytes = wm.width().div_ceil(8);
    for y in 0..wm.height() {
        let mut row = vec![0u8; row_bytes];
        for x in 0..wm.width() {
            if wm.bits()[y * wm.width() + x] == 1 {
                row[x / 8] |= 1 << (7 - x % 8);
            }
        }
        out.extend_from_slice(&row);
    }
    out
}

/// Encode a logo as PGM with bit 1 rendered as 255 (reads back as bit 1).
pub fn logo_pgm_bytes(wm: &WatermarkBits) -> Vec<u8> {
    let img = GrayImage::new(
        wm.width(),
        wm.height(),
        wm.bits().iter().map(|&b| b * 255).collect(),
    )
    .expect("logo dimensions are valid");
    pgm_bytes(&img)
}

pub fn read_pgm<P: AsRef<Path>>(path: P) -> Result<GrayImage> {
    parse_pgm(&fs::read(path)?)
}

pub fn write_pgm<P: AsRef<Path>>(path: P, img: &GrayImage) -> Result<()> {
    Ok(fs::write(path, pgm_bytes(img))?)
}

pub fn read_logo<P: AsRef<Path>>(path: P) -> Result<WatermarkBits> {
    parse_logo(&fs::read(path)?)
}

/// Write a logo; `.pbm` paths get P4, anything else P5 with 0/255 pixels.
pub fn write_logo<P: AsRef<Path>>(path: P, wm: &WatermarkBits) -> Result<()> {
    let bytes = if path
        .as_ref()
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("pbm"))
    {
        pbm_bytes(wm)
    } else {
        logo_pgm_bytes(wm)
    };
    Ok(fs::write(path, bytes)?)
}
