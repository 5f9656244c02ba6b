//! Radiance `.hdr` (RGBE) codec.

use std::io::Write;

use crate::color::Rgb;
use crate::error::{HdrError, Result};
use crate::scalar::Real;

use super::RadianceMap;

/// Shared-exponent pixel as stored on disk.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RgbeTexel {
    pub r: u8,
    pub g: u8,
    pub b: u8,
    pub e: u8,
}

/// `(m + 0.5) · 2^(e − 136)`; a zero exponent is black.
pub fn rgb_from_rgbe(t: RgbeTexel) -> Rgb<f64> {
    if t.e == 0 {
        return Rgb::zero();
    }
    let scale = 2f64.powi(t.e as i32 - 136);
    Rgb::new(
        (t.r as f64 + 0.5) * scale,
        (t.g as f64 + 0.5) * scale,
        (t.b as f64 + 0.5) * scale,
    )
}

/// Truncating encoder matched to the mantissa-center decoder.
pub fn rgbe_from_rgb(c: Rgb<f64>) -> RgbeTexel {
    let max = c.max_component();
    if !(max > 1e-38) {
        return RgbeTexel::default();
    }
    // max = f · 2^e with f ∈ [0.5, 1)
    let mut e = max.log2().floor() as i32 + 1;
    while max >= 2f64.powi(e) {
        e += 1;
    }
    while max < 2f64.powi(e - 1) {
        e -= 1;
    }
    if e + 128 > 255 {
        return RgbeTexel {
            r: 255,
            g: 255,
            b: 255,
            e: 255,
        };
    }
    if e + 128 < 1 {
        return RgbeTexel::default();
    }
    let scale = 2f64.powi(8 - e);
    let q = |v: f64| (v.max(0.0) * scale).floor().min(255.0) as u8;
    RgbeTexel {
        r: q(c.r),
        g: q(c.g),
        b: q(c.b),
        e: (e + 128) as u8,
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn line(&mut self) -> Option<&'a [u8]> {
        if self.pos >= self.bytes.len() {
            return None;
        }
        let rest = &self.bytes[self.pos..];
        let end = rest.iter().position(|&b| b == b'\n').unwrap_or(rest.len());
        self.pos += (end + 1).min(rest.len());
        let line = &rest[..end];
        Some(line.strip_suffix(b"\r").unwrap_or(line))
    }

    fn take(&mut self, n: usize) -> Option<&'a [u8]> {
        let s = self.bytes.get(self.pos..self.pos + n)?;
        self.pos += n;
        Some(s)
    }

    fn byte(&mut self) -> Option<u8> {
        let b = *self.bytes.get(self.pos)?;
        self.pos += 1;
        Some(b)
    }

    fn peek(&self, n: usize) -> Option<&'a [u8]> {
        self.bytes.get(self.pos..self.pos + n)
    }
}

fn parse_resolution(line: &str) -> Option<(usize, usize)> {
    let parts: Vec<&str> = line.split_whitespace().collect();
    match parts.as_slice() {
        ["-Y", h, "+X", w] => Some((w.parse().ok()?, h.parse().ok()?)),
        _ => None,
    }
}

/// Decodes a Radiance `.hdr` stream (`-Y H +X W` orientation only).
pub fn decode_radiance_hdr<T: Real>(bytes: &[u8]) -> Result<RadianceMap<T>> {
    let (width, height, texels) = decode_texels(bytes)?;
    let pixels = texels.into_iter().map(|t| rgb_from_rgbe(t).cast()).collect();
    RadianceMap::new(width, height, pixels)
}

pub(crate) fn decode_texels(bytes: &[u8]) -> Result<(usize, usize, Vec<RgbeTexel>), HdrError> {
    let mut cur = Cursor { bytes, pos: 0 };
    let magic = cur.line().ok_or(HdrError::BadMagic)?;
    if !(magic.starts_with(b"#?RADIANCE") || magic.starts_with(b"#?RGBE")) {
        return Err(HdrError::BadMagic);
    }
    loop {
        let line = cur.line().ok_or(HdrError::TruncatedHeader)?;
        if line.is_empty() {
            break;
        }
        if let Some(fmt) = line.strip_prefix(b"FORMAT=") {
            let fmt = String::from_utf8_lossy(fmt).trim().to_string();
            if fmt != "32-bit_rle_rgbe" {
                return Err(HdrError::UnsupportedFormat(fmt));
            }
        }
    }
    let res = cur.line().ok_or(HdrError::TruncatedHeader)?;
    let res = String::from_utf8_lossy(res).to_string();
    let (width, height) = parse_resolution(&res).ok_or_else(|| HdrError::BadResolution(res.clone()))?;
    if width == 0 || height == 0 {
        return Err(HdrError::BadResolution(res));
    }

    let mut texels = Vec::with_capacity(width * height);
    let mut channels = vec![0u8; 4 * width];
    for row in 0..height {
        let rle = (8..=0x7fff).contains(&width) && matches!(cur.peek(4), Some([2, 2, hi, _]) if hi & 0x80 == 0);
        if rle {
            let head = cur.take(4).ok_or(HdrError::TruncatedScanline { row })?;
            let found = ((head[2] as usize) << 8) | head[3] as usize;
            if found != width {
                return Err(HdrError::ScanlineWidthMismatch {
                    row,
                    found,
                    expected: width,
                });
            }
            for ch in 0..4 {
                let dst = &mut channels[ch * width..(ch + 1) * width];
                let mut i = 0;
                while i < width {
                    let count = cur.byte().ok_or(HdrError::TruncatedScanline { row })?;
                    if count > 128 {
                        let n = (count - 128) as usize;
                        let v = cur.byte().ok_or(HdrError::TruncatedScanline { row })?;
                        if i + n > width {
                            return Err(HdrError::RleOverrun { row });
                        }
                        dst[i..i + n].fill(v);
                        i += n;
                    } else {
                        let n = count as usize;
                        if n == 0 {
                            return Err(HdrError::ZeroLengthRun { row });
                        }
                        if i + n > width {
                            return Err(HdrError::RleOverrun { row });
                        }
                        let src = cur.take(n).ok_or(HdrError::TruncatedScanline { row })?;
                        dst[i..i + n].copy_from_slice(src);
                        i += n;
                    }
                }
            }
            for x in 0..width {
                texels.push(RgbeTexel {
                    r: channels[x],
                    g: channels[width + x],
                    b: channels[2 * width + x],
                    e: channels[3 * width + x],
                });
            }
        } else {
            let raw = cur.take(4 * width).ok_or(HdrError::TruncatedScanline { row })?;
            texels.extend(raw.chunks_exact(4).map(|p| RgbeTexel {
                r: p[0],
                g: p[1],
                b: p[2],
                e: p[3],
            }));
        }
    }
    Ok((width, height, texels))
}

const MIN_RUN: usize = 4;

fn rle_channel(data: &[u8], out: &mut Vec<u8>) {
    let mut i = 0;
    while i < data.len() {
        // find the next run of at least MIN_RUN identical bytes
        let mut run_start = i;
        let mut run_len = 0;
        while run_start < data.len() {
            run_len = 1;
            while run_start + run_len < data.len() && run_len < 127 && data[run_start + run_len] == data[run_start] {
                run_len += 1;
            }
            if run_len >= MIN_RUN {
                break;
            }
            run_start += run_len;
        }
        if run_len < MIN_RUN {
            run_start = data.len();
        }
        while i < run_start {
            let n = (run_start - i).min(128);
            out.push(n as u8);
            out.extend_from_slice(&data[i..i + n]);
            i += n;
        }
        if run_start < data.len() {
            out.push(128 + run_len as u8);
            out.push(data[run_start]);
            i = run_start + run_len;
        }
    }
}

/// Encodes with new-style RLE scanlines when `width ∈ [8, 32767]`, flat otherwise.
pub fn encode_radiance_hdr<T: Real>(map: &RadianceMap<T>) -> Vec<u8> {
    encode_raster(map.width(), map.height(), map.texels())
}

/// Encodes any row-major RGB raster (no aspect-ratio requirement).
pub(crate) fn encode_raster<T: Real>(w: usize, h: usize, pixels: &[Rgb<T>]) -> Vec<u8> {
    debug_assert_eq!(pixels.len(), w * h);
    let mut out = Vec::with_capacity(w * h * 4 + 64);
    out.extend_from_slice(b"#?RADIANCE\nFORMAT=32-bit_rle_rgbe\n\n");
    writeln!(out, "-Y {h} +X {w}").expect("write to Vec");
    let rle = (8..=0x7fff).contains(&w);
    let mut line = vec![0u8; 4 * w];
    for row in 0..h {
        let texels = pixels[row * w..(row + 1) * w].iter().map(|c| rgbe_from_rgb(c.cast()));
        if rle {
            for (x, t) in texels.enumerate() {
                line[x] = t.r;
                line[w + x] = t.g;
                line[2 * w + x] = t.b;
                line[3 * w + x] = t.e;
            }
            out.extend_from_slice(&[2, 2, (w >> 8) as u8, (w & 0xff) as u8]);
            for ch in 0..4 {
                rle_channel(&line[ch * w..(ch + 1) * w], &mut out);
            }
        } else {
            for t in texels {
                out.extend_from_slice(&[t.r, t.g, t.b, t.e]);
            }
        }
    }
    out
}
