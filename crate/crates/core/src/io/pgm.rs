//! Portable graymap (PGM) images, plain (`P2`) and raw (`P5`).

use std::path::Path;

use super::records::write_bytes;
use crate::error::{Error, Result};
use crate::experiments::Image;

/// Largest accepted width times height.
pub const MAX_PIXELS: usize = 1 << 26;

struct Header {
    magic: u8,
    width: usize,
    height: usize,
    maxval: u32,
    data_start: usize,
}

fn read_header(bytes: &[u8]) -> Result<Header> {
    if bytes.len() < 2 || bytes[0] != b'P' || !(bytes[1] == b'2' || bytes[1] == b'5') {
        return Err(Error::invalid("not a PGM file (expected P2 or P5)"));
    }
    let mut pos = 2;
    let mut fields = [0u64; 3];
    for field in &mut fields {
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                break;
            }
        }
        let start = pos;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::invalid("truncated PGM header"));
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::invalid("PGM header value out of range"))?;
    }
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(Error::invalid("PGM header must end with whitespace"));
    }
    let [width, height, maxval] = fields;
    if width == 0 || height == 0 {
        return Err(Error::invalid("PGM image has zero extent"));
    }
    if !(1..=65535).contains(&maxval) {
        return Err(Error::invalid(format!("PGM maxval {maxval} outside 1..=65535")));
    }
    let pixels = width.checked_mul(height).filter(|&p| p <= MAX_PIXELS as u64);
    if pixels.is_none() {
        return Err(Error::invalid("PGM image too large"));
    }
    Ok(Header {
        magic: bytes[1],
        width: width as usize,
        height: height as usize,
        maxval: maxval as u32,
        data_start: pos + 1,
    })
}

/// Pixel values are returned on their stored scale (`0..=maxval`).
pub fn decode_pgm(bytes: &[u8]) -> Result<Image> {
    let h = read_header(bytes)?;
    let count = h.width * h.height;
    let data = &bytes[h.data_start..];
    let mut pixels = Vec::with_capacity(count);
    if h.magic == b'5' {
        let wide = h.maxval > 255;
        let need = if wide { 2 * count } else { count };
        if data.len() < need {
            return Err(Error::invalid(format!("PGM raster truncated: {} of {need} bytes", data.len())));
        }
        for i in 0..count {
            let v = if wide {
                u16::from_be_bytes([data[2 * i], data[2 * i + 1]]) as u32
            } else {
                data[i] as u32
            };
            if v > h.maxval {
                return Err(Error::invalid(format!("pixel {v} exceeds maxval {}", h.maxval)));
            }
            pixels.push(v as f64);
        }
    } else {
        let text = std::str::from_utf8(data).map_err(|_| Error::invalid("P2 raster is not ASCII"))?;
        for tok in text
            .lines()
            .map(|l| l.split('#').next().unwrap_or(""))
            .flat_map(str::split_ascii_whitespace)
        {
            if pixels.len() == count {
                return Err(Error::invalid("P2 raster has extra values"));
            }
            let v: u32 = tok
                .parse()
                .map_err(|_| Error::invalid(format!("bad P2 pixel {tok:?}")))?;
            if v > h.maxval {
                return Err(Error::invalid(format!("pixel {v} exceeds maxval {}", h.maxval)));
            }
            pixels.push(v as f64);
        }
        if pixels.len() != count {
            return Err(Error::invalid(format!("P2 raster has {} of {count} values", pixels.len())));
        }
    }
    Image::new(h.height, h.width, pixels)
}

/// Raw `P5` with `maxval = 255`; values are rounded and clamped to `0..=255`.
pub fn encode_pgm(image: &Image) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", image.width, image.height).into_bytes();
    out.extend(image.pixels.iter().map(|&p| {
        if p.is_nan() {
            0
        } else {
            p.round().clamp(0.0, 255.0) as u8
        }
    }));
    out
}

pub fn read_pgm(path: impl AsRef<Path>) -> Result<Image> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_pgm(&bytes).map_err(|e| Error::invalid(format!("{}: {e}", path.display())))
}

pub fn write_pgm(image: &Image, path: impl AsRef<Path>) -> Result<()> {
    write_bytes(path.as_ref(), &encode_pgm(image))
}
