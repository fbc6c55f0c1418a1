//! Binary PGM (P5) and PPM (P6) images, 8-bit.
//!
//! Pixels are mapped to `[0, 1]` on reading; on writing they are clamped to
//! `[0, 1]` and rounded to the nearest of 256 levels.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

fn format_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Format(msg.into()))
}

struct Header {
    magic: [u8; 2],
    width: usize,
    height: usize,
    maxval: usize,
    data_start: usize,
}

fn skip_space_and_comments(bytes: &[u8], mut pos: usize) -> usize {
    while pos < bytes.len() {
        match bytes[pos] {
            b'#' => {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            }
            b if b.is_ascii_whitespace() => pos += 1,
            _ => break,
        }
    }
    pos
}

fn read_number(bytes: &[u8], pos: usize) -> Result<(usize, usize)> {
    let start = skip_space_and_comments(bytes, pos);
    let mut end = start;
    while end < bytes.len() && bytes[end].is_ascii_digit() {
        end += 1;
    }
    if end == start {
        return format_err("expected a decimal number in header");
    }
    let text = std::str::from_utf8(&bytes[start..end]).expect("digits are ascii");
    let value = text
        .parse()
        .map_err(|_| Error::Format(format!("header number '{text}' out of range")))?;
    Ok((value, end))
}

fn parse_header(bytes: &[u8]) -> Result<Header> {
    if bytes.len() < 2 || bytes[0] != b'P' || !matches!(bytes[1], b'5' | b'6') {
        return format_err("not a binary PGM/PPM file (expected P5 or P6)");
    }
    let (width, pos) = read_number(bytes, 2)?;
    let (height, pos) = read_number(bytes, pos)?;
    let (maxval, pos) = read_number(bytes, pos)?;
    if width == 0 || height == 0 {
        return format_err("zero image dimension");
    }
    if maxval == 0 || maxval > 255 {
        return format_err(format!("only 8-bit images are supported, maxval {maxval}"));
    }
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return format_err("missing whitespace after maxval");
    }
    Ok(Header {
        magic: [bytes[0], bytes[1]],
        width,
        height,
        maxval,
        data_start: pos + 1,
    })
}

/// Decodes a P5 (one channel) or P6 (three channels) image.
pub fn decode_pnm(bytes: &[u8]) -> Result<Vec<DenseMatrix>> {
    let h = parse_header(bytes)?;
    let channels = if h.magic[1] == b'5' { 1 } else { 3 };
    let need = h.width * h.height * channels;
    let data = &bytes[h.data_start..];
    if data.len() < need {
        return format_err(format!("pixel data truncated: {} of {need} bytes", data.len()));
    }
    let scale = 1.0 / h.maxval as f64;
    Ok((0..channels)
        .map(|c| {
            DenseMatrix::from_fn(h.height, h.width, |i, j| {
                data[(i * h.width + j) * channels + c] as f64 * scale
            })
        })
        .collect())
}

fn quantize(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

/// Encodes one channel as P5 or three channels as P6.
pub fn encode_pnm(channels: &[DenseMatrix]) -> Result<Vec<u8>> {
    let magic = match channels.len() {
        1 => "P5",
        3 => "P6",
        k => return format_err(format!("cannot encode {k} channels")),
    };
    let (height, width) = channels[0].shape();
    if channels.iter().any(|c| c.shape() != (height, width)) {
        return format_err("channels differ in shape");
    }
    let mut out = format!("{magic}\n{width} {height}\n255\n").into_bytes();
    out.reserve(width * height * channels.len());
    for i in 0..height {
        for j in 0..width {
            for c in channels {
                out.push(quantize(c[(i, j)]));
            }
        }
    }
    Ok(out)
}

pub fn read_pnm(path: impl AsRef<Path>) -> Result<Vec<DenseMatrix>> {
    decode_pnm(&fs::read(path)?)
}

pub fn write_pnm(path: impl AsRef<Path>, channels: &[DenseMatrix]) -> Result<()> {
    fs::write(path, encode_pnm(channels)?)?;
    Ok(())
}
