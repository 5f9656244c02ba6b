//! On-disk formats: 16-bit PNG images and mattes, OLAT stack directories, `.hdr` files.
//!
//! Stack layout: `stack/NNN.png` (one per light, zero-padded to three digits),
//! `alpha.png` (16-bit gray, optional) and `uniform.png` (optional). PNG samples
//! are linear: `value / 65535`.

use std::path::{Path, PathBuf};

use ::image::{DynamicImage, ImageBuffer, ImageFormat, ImageReader, Luma};

use crate::compositor::OlatStack;
use crate::envmap::{
    decode_radiance_hdr, decode_texels, encode_radiance_hdr, encode_raster, rgb_from_rgbe, RadianceMap,
};
use crate::error::{Error, Result};
use crate::geometry::LightRig;
use crate::image::{DisplayImage, LinearImage, Matte};
use crate::scalar::Real;

const PNG_MAX: f64 = 65535.0;

pub fn slice_path(dir: &Path, index: usize) -> PathBuf {
    dir.join("stack").join(format!("{index:03}.png"))
}

pub fn alpha_path(dir: &Path) -> PathBuf {
    dir.join("alpha.png")
}

pub fn uniform_path(dir: &Path) -> PathBuf {
    dir.join("uniform.png")
}

fn quantize<T: Real>(v: T) -> u16 {
    (v.to_f64_lossy().clamp(0.0, 1.0) * PNG_MAX).round() as u16
}

fn dequantize<T: Real>(v: u16) -> T {
    T::of(v as f64 / PNG_MAX)
}

fn decode_png(path: &Path) -> Result<DynamicImage> {
    let reader = ImageReader::open(path).map_err(|e| Error::io(path, e))?;
    Ok(reader.with_guessed_format().map_err(|e| Error::io(path, e))?.decode()?)
}

fn dim_u32(n: usize) -> Result<u32> {
    u32::try_from(n).map_err(|_| Error::invalid("image size", format!("{n} exceeds the PNG limit")))
}

/// Reads any 8- or 16-bit PNG as linear RGB in `[0, 1]`.
pub fn read_png<T: Real>(path: &Path) -> Result<LinearImage<T>> {
    let img = decode_png(path)?.to_rgb16();
    let (w, h) = img.dimensions();
    LinearImage::new(
        w as usize,
        h as usize,
        img.into_raw().into_iter().map(dequantize).collect(),
    )
}

pub fn write_png<T: Real>(path: &Path, img: &DisplayImage<T>) -> Result<()> {
    let raw: Vec<u16> = img.samples().iter().map(|&v| quantize(v)).collect();
    let buf: ImageBuffer<::image::Rgb<u16>, _> =
        ImageBuffer::from_raw(dim_u32(img.width())?, dim_u32(img.height())?, raw)
            .expect("buffer length matches dimensions");
    buf.save_with_format(path, ImageFormat::Png)?;
    Ok(())
}

pub fn read_matte<T: Real>(path: &Path) -> Result<Matte<T>> {
    let img = decode_png(path)?.to_luma16();
    let (w, h) = img.dimensions();
    Matte::new(
        w as usize,
        h as usize,
        img.into_raw().into_iter().map(dequantize).collect(),
    )
}

pub fn write_matte<T: Real>(path: &Path, matte: &Matte<T>) -> Result<()> {
    let raw: Vec<u16> = matte.values().iter().map(|&v| quantize(v)).collect();
    let buf: ImageBuffer<Luma<u16>, _> = ImageBuffer::from_raw(dim_u32(matte.width())?, dim_u32(matte.height())?, raw)
        .expect("buffer length matches dimensions");
    buf.save_with_format(path, ImageFormat::Png)?;
    Ok(())
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::io(path, e))
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn read_envmap<T: Real>(path: &Path) -> Result<RadianceMap<T>> {
    decode_radiance_hdr(&read_bytes(path)?)
}

pub fn write_envmap<T: Real>(path: &Path, map: &RadianceMap<T>) -> Result<()> {
    write_bytes(path, &encode_radiance_hdr(map))
}

/// Reads a `.hdr` file of any aspect ratio as a linear image.
pub fn read_hdr_image<T: Real>(path: &Path) -> Result<LinearImage<T>> {
    let (w, h, texels) = decode_texels(&read_bytes(path)?)?;
    let samples = texels
        .into_iter()
        .flat_map(|t| rgb_from_rgbe(t).cast::<T>().to_array())
        .collect();
    LinearImage::new(w, h, samples)
}

pub fn write_hdr_image<T: Real>(path: &Path, img: &LinearImage<T>) -> Result<()> {
    let pixels: Vec<_> = img.pixels().collect();
    write_bytes(path, &encode_raster(img.width(), img.height(), &pixels))
}

/// Reads `images.len() == rig.len()` slices plus the optional matte and uniform frame.
pub fn load_stack<T: Real>(dir: &Path, rig: &LightRig<T>) -> Result<OlatStack<T>> {
    let images = (0..rig.len())
        .map(|i| read_png(&slice_path(dir, i)))
        .collect::<Result<Vec<_>>>()?;
    let alpha = alpha_path(dir);
    let alpha = if alpha.exists() {
        Some(read_matte(&alpha)?)
    } else {
        None
    };
    let uniform = uniform_path(dir);
    let uniform = if uniform.exists() {
        Some(read_png(&uniform)?)
    } else {
        None
    };
    OlatStack::new(rig.clone(), images, alpha, uniform)
}

/// Writes the stack layout; every sample must already lie in `[0, 1]`.
pub fn save_stack<T: Real>(dir: &Path, stack: &OlatStack<T>) -> Result<()> {
    let slices = dir.join("stack");
    std::fs::create_dir_all(&slices).map_err(|e| Error::io(&slices, e))?;
    for (i, img) in stack.images().iter().enumerate() {
        write_png(&slice_path(dir, i), &DisplayImage::try_from_linear(img.clone())?)?;
    }
    if let Some(m) = stack.alpha() {
        write_matte(&alpha_path(dir), m)?;
    }
    if let Some(u) = stack.uniform() {
        write_png(&uniform_path(dir), &DisplayImage::try_from_linear(u.clone())?)?;
    }
    Ok(())
}
