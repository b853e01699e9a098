//! File codecs: PGM (P5) images, PBM (P4) mirror patterns, the CFLD
//! complex-field container and JSON metric reports.

use std::fs;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::modulator::ComplexField;
use crate::optics::AmplitudeImage;
use crate::stego::DmdPattern;

pub const FIELD_MAGIC: &[u8; 4] = b"CFLD";
pub const FIELD_VERSION: u8 = 1;
const FIELD_HEADER_LEN: usize = 4 + 1 + 4 + 4 + 4;

/// Cursor over a netpbm header.
struct Header<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Header<'a> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.data.get(self.pos) {
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while let Some(&c) = self.data.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn magic(&mut self, expected: &[u8; 2]) -> Result<()> {
        if self.data.len() < 2 || &self.data[..2] != expected {
            return Err(Error::parse(
                0,
                format!("expected magic {:?}", String::from_utf8_lossy(expected)),
            ));
        }
        self.pos = 2;
        Ok(())
    }

    fn number(&mut self) -> Result<usize> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.data.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::parse(start, "expected a decimal number"));
        }
        std::str::from_utf8(&self.data[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| Error::parse(start, "number out of range"))
    }

    /// Consumes the single whitespace byte that ends the header.
    fn end(&mut self) -> Result<usize> {
        match self.data.get(self.pos) {
            Some(b) if b.is_ascii_whitespace() => Ok(self.pos + 1),
            _ => Err(Error::parse(self.pos, "expected whitespace after header")),
        }
    }
}

pub fn decode_pgm(data: &[u8]) -> Result<AmplitudeImage> {
    let mut h = Header { data, pos: 0 };
    h.magic(b"P5")?;
    let width = h.number()?;
    let height = h.number()?;
    let maxval_at = h.pos;
    let maxval = h.number()?;
    if maxval != 255 {
        return Err(Error::parse(maxval_at, format!("unsupported maxval {maxval}, expected 255")));
    }
    let start = h.end()?;
    let expected = width * height;
    let body = &data[start..];
    if body.len() < expected {
        return Err(Error::parse(
            data.len(),
            format!("truncated raster: expected {expected} bytes, found {}", body.len()),
        ));
    }
    AmplitudeImage::from_gray8(width, height, &body[..expected])
}

pub fn encode_pgm(img: &AmplitudeImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend(img.to_gray8());
    out
}

pub fn read_image(path: impl AsRef<Path>) -> Result<AmplitudeImage> {
    decode_pgm(&fs::read(path)?)
}

pub fn write_image(path: impl AsRef<Path>, img: &AmplitudeImage) -> Result<()> {
    Ok(fs::write(path, encode_pgm(img))?)
}

/// PBM bit 1 (black) is an ON mirror. Rows are padded to whole bytes.
pub fn decode_pbm(data: &[u8]) -> Result<DmdPattern> {
    let mut h = Header { data, pos: 0 };
    h.magic(b"P4")?;
    let width = h.number()?;
    let height = h.number()?;
    let start = h.end()?;
    let stride = width.div_ceil(8);
    let expected = stride * height;
    let body = &data[start..];
    if body.len() < expected {
        return Err(Error::parse(
            data.len(),
            format!("truncated raster: expected {expected} bytes, found {}", body.len()),
        ));
    }
    let mut mirrors = Vec::with_capacity(width * height);
    for row in body[..expected].chunks(stride) {
        mirrors.extend((0..width).map(|x| row[x / 8] >> (7 - x % 8) & 1 == 1));
    }
    DmdPattern::from_mirrors(width, height, mirrors)
}

pub fn encode_pbm(p: &DmdPattern) -> Vec<u8> {
    let mut out = format!("P4\n{} {}\n", p.width(), p.height()).into_bytes();
    for row in p.mirrors().chunks(p.width()) {
        for byte in row.chunks(8) {
            out.push(
                byte.iter()
                    .enumerate()
                    .fold(0u8, |acc, (i, &on)| acc | (on as u8) << (7 - i)),
            );
        }
    }
    out
}

pub fn read_pattern(path: impl AsRef<Path>) -> Result<DmdPattern> {
    decode_pbm(&fs::read(path)?)
}

pub fn write_pattern(path: impl AsRef<Path>, p: &DmdPattern) -> Result<()> {
    Ok(fs::write(path, encode_pbm(p))?)
}

/// `CFLD`, version 1, width and height as u32 LE, a reserved zero u32, then
/// row-major (re, im) f64 LE pairs. The header is 17 bytes.
pub fn decode_field(data: &[u8]) -> Result<ComplexField> {
    if data.len() < FIELD_HEADER_LEN {
        return Err(Error::Truncated {
            expected: FIELD_HEADER_LEN,
            actual: data.len(),
        });
    }
    if &data[..4] != FIELD_MAGIC {
        return Err(Error::parse(0, "bad magic, expected CFLD"));
    }
    if data[4] != FIELD_VERSION {
        return Err(Error::parse(4, format!("unsupported version {}", data[4])));
    }
    let width = u32::from_le_bytes(data[5..9].try_into().unwrap()) as usize;
    let height = u32::from_le_bytes(data[9..13].try_into().unwrap()) as usize;
    if data[13..17] != [0; 4] {
        return Err(Error::parse(13, "reserved header word must be zero"));
    }
    let expected = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(16))
        .and_then(|n| n.checked_add(FIELD_HEADER_LEN))
        .ok_or_else(|| Error::parse(5, "field dimensions overflow"))?;
    if data.len() != expected {
        return Err(Error::Truncated {
            expected,
            actual: data.len(),
        });
    }
    let values = data[FIELD_HEADER_LEN..]
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..].try_into().unwrap()),
            )
        })
        .collect();
    ComplexField::new(width, height, values)
}

pub fn encode_field(f: &ComplexField) -> Vec<u8> {
    let mut out = Vec::with_capacity(FIELD_HEADER_LEN + 16 * f.values().len());
    out.extend_from_slice(FIELD_MAGIC);
    out.push(FIELD_VERSION);
    out.extend((f.width() as u32).to_le_bytes());
    out.extend((f.height() as u32).to_le_bytes());
    out.extend([0u8; 4]);
    for v in f.values() {
        out.extend(v.re.to_le_bytes());
        out.extend(v.im.to_le_bytes());
    }
    out
}

pub fn read_field(path: impl AsRef<Path>) -> Result<ComplexField> {
    decode_field(&fs::read(path)?)
}

pub fn write_field(path: impl AsRef<Path>, f: &ComplexField) -> Result<()> {
    Ok(fs::write(path, encode_field(f))?)
}

/// Metrics emitted by the command-line tools. Absent fields are omitted.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub ssim: Option<f64>,
    pub capacity_bits: Option<u64>,
    pub payload_bits: Option<u64>,
    pub scale: Option<f64>,
    pub strategy: Option<String>,
    pub seed: Option<String>,
    pub correlation: Option<f64>,
    pub warnings: Vec<String>,
}

fn json_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        "null".to_owned()
    }
}

fn json_string(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

impl Report {
    /// Single-line JSON with a fixed key order. Floats carry 17 significant
    /// digits.
    pub fn to_json(&self) -> String {
        let mut parts = Vec::new();
        if let Some(v) = self.ssim {
            parts.push(format!("\"ssim\": {}", json_float(v)));
        }
        if let Some(v) = self.capacity_bits {
            parts.push(format!("\"capacity_bits\": {v}"));
        }
        if let Some(v) = self.payload_bits {
            parts.push(format!("\"payload_bits\": {v}"));
        }
        if let Some(v) = self.scale {
            parts.push(format!("\"scale\": {}", json_float(v)));
        }
        if let Some(v) = &self.strategy {
            parts.push(format!("\"strategy\": {}", json_string(v)));
        }
        if let Some(v) = &self.seed {
            parts.push(format!("\"seed\": {}", json_string(v)));
        }
        if let Some(v) = self.correlation {
            parts.push(format!("\"correlation\": {}", json_float(v)));
        }
        if !self.warnings.is_empty() {
            let items: Vec<String> = self.warnings.iter().map(|w| json_string(w)).collect();
            parts.push(format!("\"warnings\": [{}]", items.join(", ")));
        }
        format!("{{{}}}", parts.join(", "))
    }
}

pub fn write_report(report: &Report) -> String {
    report.to_json()
}
